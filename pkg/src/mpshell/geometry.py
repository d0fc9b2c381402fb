"""Mid-surface geometry and the two-term shell deformation gradient.

The reference director field is interpolated bilinearly from nodal
directors.  The covariant frame at a surface point is ``{A_1, A_2, A_3}``
with ``A_3`` the interpolated director, and ``A^i`` is its dual basis so
that ``A_i (x) A^i = I`` holds exactly.  For a flat mid-surface (or exact
nodal normals on a flat element) ``A_3`` is the unit normal.

Shapes follow numpy broadcasting: every function accepts leading batch
axes.
"""

from dataclasses import dataclass

import numpy as np

from .rotation import InvalidConfigurationError


class MeshError(ValueError):
    """Degenerate element geometry."""


@dataclass
class SurfaceFrame:
    """Reference frame at one (or a batch of) surface points.

    Attributes
    ----------
    cov : (..., 2, 3) covariant surface vectors A_alpha.
    director : (..., 3) interpolated reference director A_3.
    normal : (..., 3) unit normal A_1 x A_2 / |A_1 x A_2|.
    con : (..., 3, 3) rows are the dual vectors A^1, A^2, A^3.
    metric_det : (...) determinant of the surface metric A_ab.
    volume_jac : (...) det[A_1, A_2, A_3].
    director_grad : (..., 2, 3) derivatives of the director field.
    curvature : (..., 3, 3) B = -D_,alpha (x) A^alpha.
    """

    cov: np.ndarray
    director: np.ndarray
    normal: np.ndarray
    con: np.ndarray
    metric_det: np.ndarray
    volume_jac: np.ndarray
    director_grad: np.ndarray
    curvature: np.ndarray

    def shifter(self, z):
        """``Q = I - z B`` (broadcast over ``z`` on a new trailing batch axis if array)."""
        z = np.asarray(z, dtype=float)
        return np.eye(3) - z[..., None, None] * self.curvature

    def shifter_inverse(self, z):
        q = self.shifter(z)
        if np.any(np.linalg.det(q) <= 0.0):
            raise MeshError("shifter is singular (thickness exceeds radius of curvature)")
        return np.linalg.inv(q)


def surface_frame_at(coords, directors, dn_u, n_c, dn_c):
    """Reference frame from element nodal data at one parent point.

    Parameters
    ----------
    coords : (..., 8, 3) reference nodal coordinates.
    directors : (..., 4, 3) reference nodal directors at the corners.
    dn_u : (8, 2) serendipity derivatives at the point.
    n_c, dn_c : (4,), (4, 2) bilinear values and derivatives.
    """
    cov = np.einsum("...Ii,Ia->...ai", coords, dn_u)
    director = np.einsum("...Ji,J->...i", directors, n_c)
    director_grad = np.einsum("...Ji,Ja->...ai", directors, dn_c)
    cross = np.cross(cov[..., 0, :], cov[..., 1, :])
    area = np.linalg.norm(cross, axis=-1)
    if np.any(area <= 0.0):
        raise MeshError("degenerate element: zero surface metric")
    normal = cross / area[..., None]
    basis = np.stack([cov[..., 0, :], cov[..., 1, :], director], axis=-1)
    jac = np.linalg.det(basis)
    if np.any(jac <= 0.0):
        raise MeshError("director points against the element normal")
    con = np.linalg.inv(basis)
    curvature = -np.einsum("...ai,...aj->...ij", director_grad, con[..., :2, :])
    return SurfaceFrame(
        cov=cov,
        director=director,
        normal=normal,
        con=con,
        metric_det=area**2,
        volume_jac=jac,
        director_grad=director_grad,
        curvature=curvature,
    )


def deformation_gradient_parts(du, w, dw, phi, frame):
    """Constant and linear parts of the through-thickness expansion of F*.

    ``F0 = I + u_,a (x) A^a + w (x) A^3``
    ``F1 = (D_,a + w_,a) (x) A^a + 2 phi (D + w) (x) A^3``

    ``du`` and ``dw`` carry the parent derivatives on axis -2 (shape
    ``(..., 2, 3)``).  ``F1`` equals ``Grad w + 2 phi d (x) D - B``.
    """
    con = frame.con
    F0 = np.eye(3) + np.einsum("...ai,...aj->...ij", du, con[..., :2, :]) + np.einsum(
        "...i,...j->...ij", w, con[..., 2, :]
    )
    d = frame.director + w
    dd = frame.director_grad + dw
    F1 = np.einsum("...ai,...aj->...ij", dd, con[..., :2, :]) + 2.0 * np.asarray(phi)[..., None, None] * np.einsum(
        "...i,...j->...ij", d, con[..., 2, :]
    )
    return F0, F1


def total_deformation_gradient(F0, F1, Fbar, z, frame):
    """``F = (F0 + Fbar + z F1) Q^-1``; raises when ``det F <= 0``."""
    z = np.asarray(z, dtype=float)
    fstar = F0 + Fbar + z[..., None, None] * F1
    F = fstar @ frame.shifter_inverse(z)
    if np.any(np.linalg.det(F) <= 0.0):
        raise InvalidConfigurationError("deformation gradient with non-positive determinant")
    return F


def nodal_directors(coords, elements):
    """Area-weighted averaged unit normals at the element corners.

    Parameters
    ----------
    coords : (nn, 3) node coordinates.
    elements : (ne, 8) connectivity.

    Returns
    -------
    (nn, 3) array; rows of nodes that are not element corners are zero.
    """
    from .shape import NODE_XI, serendipity

    acc = np.zeros((coords.shape[0], 3))
    for a in range(4):
        _, dn = serendipity(*NODE_XI[a])
        cov = np.einsum("eIi,Ia->eai", coords[elements], dn)
        # cross product magnitude is the local area density
        acc_e = np.cross(cov[:, 0], cov[:, 1])
        np.add.at(acc, elements[:, a], acc_e)
    norm = np.linalg.norm(acc, axis=1)
    out = np.zeros_like(acc)
    mask = norm > 0
    out[mask] = acc[mask] / norm[mask, None]
    return out
