"""Small-tensor algebra in the 9-component vector convention.

Second-order tensors are stored as ``(..., 3, 3)`` arrays.  Their vector
form uses the fixed component order

    {11, 22, 33, 12, 21, 13, 31, 23, 32}

and every fourth-order tensor is a ``(..., 9, 9)`` matrix whose rows and
columns follow the same order.  With this layout the double contraction
``C : A`` becomes ``C9 @ vec9(A)``.

All functions broadcast over leading axes.
"""

import numpy as np

#: Row-major flat index (3*i + j) of each Vec9 slot.
VEC9_FLAT = np.array([0, 4, 8, 1, 3, 2, 6, 5, 7])
#: (i, j) pair of each Vec9 slot.
VEC9_PAIRS = tuple(divmod(int(k), 3) for k in VEC9_FLAT)

LEVI_CIVITA = np.zeros((3, 3, 3))
LEVI_CIVITA[0, 1, 2] = LEVI_CIVITA[1, 2, 0] = LEVI_CIVITA[2, 0, 1] = 1.0
LEVI_CIVITA[0, 2, 1] = LEVI_CIVITA[2, 1, 0] = LEVI_CIVITA[1, 0, 2] = -1.0

_INV_FLAT = np.argsort(VEC9_FLAT)


def skew(v):
    """Skew tensor of ``v`` with ``skew(v)[i, j] = -eps_ijk v_k``.

    ``skew(v) @ w`` equals ``np.cross(v, w)``.
    """
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def axial(a):
    """Axial vector of the skew part of ``a`` (inverse of :func:`skew`)."""
    a = np.asarray(a, dtype=float)
    return 0.5 * np.stack(
        [a[..., 2, 1] - a[..., 1, 2], a[..., 0, 2] - a[..., 2, 0], a[..., 1, 0] - a[..., 0, 1]],
        axis=-1,
    )


def vec9(a):
    """``(..., 3, 3)`` tensor to its ``(..., 9)`` vector form."""
    a = np.asarray(a, dtype=float)
    return a.reshape(a.shape[:-2] + (9,))[..., VEC9_FLAT]


def unvec9(v):
    """Inverse of :func:`vec9`."""
    v = np.asarray(v, dtype=float)
    return v[..., _INV_FLAT].reshape(v.shape[:-1] + (3, 3))


def flat_to_vec9_rows(op):
    """Reorder the leading 9 rows of an operator from row-major to Vec9 order.

    ``op`` has shape ``(..., 3, 3, n)``; the result has shape ``(..., 9, n)``.
    """
    op = np.asarray(op)
    return op.reshape(op.shape[:-3] + (9, op.shape[-1]))[..., VEC9_FLAT, :]


def product4(kind, p, q):
    """Fourth-order products of two second-order tensors in matrix form.

    ``otimes``:   C_ijkl = P_ij Q_kl
    ``odot``:     C_ijkl = P_ik Q_jl
    ``boxtimes``: C_ijkl = P_il Q_kj
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if kind == "otimes":
        c = np.einsum("...ij,...kl->...ijkl", p, q)
    elif kind == "odot":
        c = np.einsum("...ik,...jl->...ijkl", p, q)
    elif kind == "boxtimes":
        c = np.einsum("...il,...kj->...ijkl", p, q)
    else:
        raise ValueError(f"unknown product kind {kind!r}")
    return tensor4_to_matrix(c)


def tensor4_to_matrix(c):
    """``(..., 3, 3, 3, 3)`` array to its ``(..., 9, 9)`` Vec9 matrix."""
    c = np.asarray(c, dtype=float)
    m = c.reshape(c.shape[:-4] + (9, 9))
    return m[..., VEC9_FLAT, :][..., :, VEC9_FLAT]


def matrix_to_tensor4(m):
    """Inverse of :func:`tensor4_to_matrix`."""
    m = np.asarray(m, dtype=float)
    m = m[..., _INV_FLAT, :][..., :, _INV_FLAT]
    return m.reshape(m.shape[:-2] + (3, 3, 3, 3))


def contract4(c9, a):
    """Double contraction ``C : A`` with ``C`` in matrix form."""
    return unvec9(np.einsum("...ij,...j->...i", c9, vec9(a)))


def kron_map(left, right):
    """Matrix of the linear map ``X -> left @ X @ right.T`` in Vec9 form.

    ``left`` acts on the first index, ``right`` on the second, so that
    ``vec9(left @ X @ right.T) = kron_map(left, right) @ vec9(X)``.
    """
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    k = np.einsum("...ip,...jr->...ijpr", left, right)
    return tensor4_to_matrix(k)
