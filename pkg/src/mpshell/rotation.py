"""Micro-rotation parameterization and micropolar deformation measures.

The micro-rotation is stored as a rotation pseudo-vector ``theta``.  The
rotation tensor and the variation operator ``Lambda`` (``dR = skew(Lambda
dtheta) R``) are always rebuilt from ``theta``; they are never accumulated
as matrices.

Nodal rotations are updated multiplicatively, ``R_new = R(dtheta) R(theta)``,
through the Rodrigues (Gibbs) vector composition rule.
"""

from dataclasses import dataclass, field

import numpy as np

from .tensor_core import LEVI_CIVITA, skew

#: Below this angle the rotation coefficients use a two-term Taylor series.
SMALL_ANGLE = 1.0e-4
#: Rotation angles are kept below ``pi - ROTATION_MARGIN``.
ROTATION_MARGIN = 0.1
# switch point between series and closed forms of the derivative coefficients
_SERIES_SWITCH = 1.0
_N_SERIES = 14


class RotationLimitError(ArithmeticError):
    """Composed rotation angle reaches the Rodrigues singularity margin."""


class InvalidConfigurationError(ArithmeticError):
    """Non-positive Jacobian or otherwise inadmissible kinematic state."""


def _angle(theta):
    return np.sqrt(np.einsum("...i,...i->...", theta, theta))


def _coefficients(s):
    """Coefficients of R and Lambda: sin s/s, (1-cos s)/s^2, (s-sin s)/s^3."""
    s = np.asarray(s, dtype=float)
    small = s < SMALL_ANGLE
    ss = np.where(small, 1.0, s)
    x = s * s
    a = np.where(small, 1.0 - x / 6.0, np.sin(ss) / ss)
    b = np.where(small, 0.5 - x / 24.0, 2.0 * np.sin(0.5 * ss) ** 2 / ss**2)
    c = np.where(small, 1.0 / 6.0 - x / 120.0, (ss - np.sin(ss)) / ss**3)
    return a, b, c


def _series(x, k, order):
    # d^order/dx^order of sum_n (-1)^n x^n / (2n+k)!
    from math import factorial

    out = np.zeros_like(x)
    for n in range(order, _N_SERIES + order):
        coef = (-1) ** n / factorial(2 * n + k) * factorial(n) / factorial(n - order)
        out = out + coef * x ** (n - order)
    return out


def _derivative_coefficients(s):
    """First and second radial derivative coefficients of a, b, c.

    For g(|theta|), ``dg/dtheta_k = g1 theta_k`` and
    ``d2g/dtheta_k dtheta_l = g1 delta_kl + g2 theta_k theta_l``.
    """
    s = np.asarray(s, dtype=float)
    small = s < _SERIES_SWITCH
    ss = np.where(small, 1.0, s)
    x = s * s
    sn, cs = np.sin(ss), np.cos(ss)
    closed = {
        "a1": (ss * cs - sn) / ss**3,
        "a2": (-(ss**2) * sn - 3 * ss * cs + 3 * sn) / ss**5,
        "b1": (ss * sn + 2 * cs - 2) / ss**4,
        "b2": (ss**2 * cs - 5 * ss * sn - 8 * cs + 8) / ss**6,
        "c1": (-ss * cs - 2 * ss + 3 * sn) / ss**5,
        "c2": (ss**2 * sn + 7 * ss * cs + 8 * ss - 15 * sn) / ss**7,
    }
    out = {}
    for name, k in (("a", 1), ("b", 2), ("c", 3)):
        out[name + "1"] = np.where(small, 2.0 * _series(x, k, 1), closed[name + "1"])
        out[name + "2"] = np.where(small, 4.0 * _series(x, k, 2), closed[name + "2"])
    return out


def rotation_from_vector(theta):
    """Rotation tensor from the pseudo-vector via the Euler-Rodrigues formula."""
    theta = np.asarray(theta, dtype=float)
    a, b, _ = _coefficients(_angle(theta))
    t = skew(theta)
    eye = np.broadcast_to(np.eye(3), t.shape)
    return eye + a[..., None, None] * t + b[..., None, None] * (t @ t)


def lambda_tensor(theta):
    """Variation operator with ``dR = skew(Lambda dtheta) R``."""
    theta = np.asarray(theta, dtype=float)
    a, b, c = _coefficients(_angle(theta))
    eye = np.broadcast_to(np.eye(3), theta.shape[:-1] + (3, 3))
    return (
        a[..., None, None] * eye
        + b[..., None, None] * skew(theta)
        + c[..., None, None] * np.einsum("...i,...j->...ij", theta, theta)
    )


def lambda_derivatives(theta, second=True):
    """Derivatives of Lambda with respect to theta.

    Returns ``dL[..., i, j, k] = d Lambda_ij / d theta_k`` and, when
    ``second`` is true, ``ddL[..., i, j, k, l]``.
    """
    theta = np.asarray(theta, dtype=float)
    s = _angle(theta)
    a, b, c = _coefficients(s)
    d = _derivative_coefficients(s)
    eye = np.eye(3)
    t = theta
    tt = np.einsum("...i,...j->...ij", t, t)
    eps_t = np.einsum("ijm,...m->...ij", LEVI_CIVITA, t)

    def sc(v, nd):
        return v.reshape(v.shape + (1,) * nd)

    dl = (
        sc(d["a1"], 3) * np.einsum("ij,...k->...ijk", eye, t)
        - sc(d["b1"], 3) * np.einsum("...ij,...k->...ijk", eps_t, t)
        - sc(b, 3) * LEVI_CIVITA
        + sc(d["c1"], 3) * np.einsum("...ij,...k->...ijk", tt, t)
        + sc(c, 3) * (np.einsum("ik,...j->...ijk", eye, t) + np.einsum("jk,...i->...ijk", eye, t))
    )
    if not second:
        return dl
    ttt = np.einsum("...k,...l->...kl", t, t)
    ddl = (
        np.einsum("...kl,ij->...ijkl", sc(d["a1"], 2) * eye + sc(d["a2"], 2) * ttt, eye)
        - np.einsum("...kl,...ij->...ijkl", sc(d["b1"], 2) * eye + sc(d["b2"], 2) * ttt, eps_t)
        - sc(d["b1"], 4) * (np.einsum("...k,ijl->...ijkl", t, LEVI_CIVITA) + np.einsum("...l,ijk->...ijkl", t, LEVI_CIVITA))
        + np.einsum("...kl,...ij->...ijkl", sc(d["c1"], 2) * eye + sc(d["c2"], 2) * ttt, tt)
        + sc(d["c1"], 4)
        * (
            np.einsum("...k,il,...j->...ijkl", t, eye, t)
            + np.einsum("...k,...i,jl->...ijkl", t, t, eye)
            + np.einsum("...l,ik,...j->...ijkl", t, eye, t)
            + np.einsum("...l,...i,jk->...ijkl", t, t, eye)
        )
        + sc(c, 4) * (np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye))
    )
    return dl, ddl


def micropolar_stretch(F, R):
    """Micropolar stretch ``U = R^T F``; raises on ``det F <= 0``."""
    F = np.asarray(F, dtype=float)
    if np.any(np.linalg.det(F) <= 0.0):
        raise InvalidConfigurationError("deformation gradient with non-positive determinant")
    return np.swapaxes(R, -1, -2) @ F


def curvature_vectors(theta, dtheta):
    """Material curvature vectors ``k_alpha`` with ``skew(k_alpha) = R^T R_,alpha``.

    ``dtheta[..., :, alpha]`` holds the surface derivative of theta.
    Uses ``R_,alpha = skew(Lambda theta_,alpha) R`` and ``R^T Lambda = Lambda^T``.
    """
    lam = lambda_tensor(theta)
    return np.swapaxes(lam, -1, -2) @ dtheta


def shell_wryness(R, dR, con_basis, q_inv):
    """Wryness tensor ``Gamma = -1/2 eps : [R^T (Grad_S R) Q^-1]``.

    Parameters
    ----------
    R : (..., 3, 3) rotation at the point.
    dR : (..., 2, 3, 3) derivatives of R along the two surface coordinates.
    con_basis : (..., 2, 3) contravariant surface vectors A^alpha.
    q_inv : (..., 3, 3) inverse shifter.

    The sign convention gives ``Gamma -> Grad theta`` for infinitesimal
    rotations.
    """
    if np.any(np.linalg.det(q_inv) <= 0.0):
        raise InvalidConfigurationError("singular shifter")
    rt = np.swapaxes(R, -1, -2)
    w = np.einsum("...ij,...ajk->...aik", rt, dR)
    # k_alpha from the skew matrix R^T R_,alpha
    k = np.stack(
        [w[..., 2, 1] - w[..., 1, 2], w[..., 0, 2] - w[..., 2, 0], w[..., 1, 0] - w[..., 0, 1]], axis=-1
    ) * 0.5
    g_surf = np.einsum("...ai,...aj->...ij", k, con_basis)
    return g_surf @ q_inv


def wryness_from_field(theta, dtheta, con_basis, q_inv):
    """Wryness from the interpolated rotation field (closed form of :func:`shell_wryness`)."""
    k = curvature_vectors(theta, dtheta)
    return np.einsum("...ia,...aj->...ij", k, con_basis) @ q_inv


def update_rotation(theta, delta_theta, margin=ROTATION_MARGIN):
    """Compose rotations so that ``R(result) = R(delta_theta) R(theta)``.

    Uses the Rodrigues vectors ``n tan(angle/2)``.  Raises
    :class:`RotationLimitError` when the composed angle reaches ``pi - margin``.
    """
    theta = np.asarray(theta, dtype=float)
    delta_theta = np.asarray(delta_theta, dtype=float)
    g = _gibbs(theta)
    dg = _gibbs(delta_theta)
    denom = 1.0 - np.einsum("...i,...i->...", g, dg)
    limit = np.tan(0.5 * (np.pi - margin))
    num = g + dg + np.cross(dg, g)
    norm_num = np.sqrt(np.einsum("...i,...i->...", num, num))
    if np.any(denom <= 0.0) or np.any(norm_num >= limit * denom):
        raise RotationLimitError("composed micro-rotation exceeds pi - margin")
    gn = num / denom[..., None]
    return _from_gibbs(gn)


def _gibbs(theta):
    s = _angle(theta)
    small = s < SMALL_ANGLE
    ss = np.where(small, 1.0, s)
    # tan(s/2)/s with series near zero
    f = np.where(small, 0.5 + s * s / 24.0, np.tan(0.5 * ss) / ss)
    return f[..., None] * theta


def _from_gibbs(g):
    t = np.sqrt(np.einsum("...i,...i->...", g, g))
    small = t < 0.5 * SMALL_ANGLE
    tt = np.where(small, 1.0, t)
    f = np.where(small, 2.0 - 2.0 * t * t / 3.0, 2.0 * np.arctan(tt) / tt)
    return f[..., None] * g


@dataclass
class RotationState:
    """Micro-rotation of one node with cached tensors rebuilt from ``theta``."""

    theta: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float).copy()
        self._refresh()

    def _refresh(self):
        self.rotation = rotation_from_vector(self.theta)
        self.lam = lambda_tensor(self.theta)

    def compose(self, delta_theta):
        self.theta = update_rotation(self.theta, delta_theta)
        self._refresh()
        return self
