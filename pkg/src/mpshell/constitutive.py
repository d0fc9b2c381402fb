"""Micropolar compressible neo-Hookean law.

Energy per unit reference volume in terms of the micropolar stretch ``U``
and the wryness ``G``::

    psi = 1/2 (mu + eta) tr(U U^T) - 1/2 eta tr(U U) + 1/2 lam (ln J)^2
          - mu ln J + 1/2 mu l^2 tr(G G^T)

with ``J = det U``.  Its derivatives are the material stress
``P = (mu + eta) U - eta U^T - (mu - lam ln J) U^-T`` and the material
couple stress ``M = mu l^2 G``.  ``psi(I, 0) = 3 mu / 2``; the offset is
kept in all solver arithmetic.
"""

from dataclasses import dataclass

import numpy as np

from .rotation import InvalidConfigurationError
from .tensor_core import kron_map, product4

_DET_FLOOR = 1.0e-12


@dataclass(frozen=True)
class MaterialParams:
    """Lame-type moduli (Pa), micropolar coupling modulus (Pa), length scale (m)."""

    lam: float
    mu: float
    eta: float
    length_scale: float

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")
        if self.lam < 0.0:
            raise ValueError("lambda must be non-negative")
        if self.eta < 0.0:
            raise ValueError("eta must be non-negative")
        if self.length_scale < 0.0:
            raise ValueError("length_scale must be non-negative")

    @classmethod
    def calibrated(cls, lam, mu, thickness, eta_ratio=0.1, length_ratio=0.1):
        """``eta = eta_ratio * mu`` and ``l = length_ratio * thickness``."""
        return cls(lam=lam, mu=mu, eta=eta_ratio * mu, length_scale=length_ratio * thickness)

    @property
    def couple_modulus(self):
        return self.mu * self.length_scale**2


def _log_det(U):
    J = np.linalg.det(U)
    if np.any(J <= _DET_FLOOR):
        raise InvalidConfigurationError("micropolar stretch with non-positive determinant")
    return np.log(J)


def energy_density(U, G, p):
    """Stored energy per unit reference volume (includes the 3 mu/2 offset)."""
    U = np.asarray(U, dtype=float)
    G = np.asarray(G, dtype=float)
    lnj = _log_det(U)
    uu = np.einsum("...ij,...ij->...", U, U)
    u2 = np.einsum("...ij,...ji->...", U, U)
    gg = np.einsum("...ij,...ij->...", G, G)
    return (
        0.5 * (p.mu + p.eta) * uu
        - 0.5 * p.eta * u2
        + 0.5 * p.lam * lnj**2
        - p.mu * lnj
        + 0.5 * p.couple_modulus * gg
    )


def material_stresses(U, G, p):
    """Material stress and couple stress ``(P, M)``."""
    U = np.asarray(U, dtype=float)
    lnj = _log_det(U)
    uit = np.swapaxes(np.linalg.inv(U), -1, -2)
    P = (p.mu + p.eta) * U - p.eta * np.swapaxes(U, -1, -2) - (p.mu - p.lam * lnj)[..., None, None] * uit
    M = p.couple_modulus * np.asarray(G, dtype=float)
    return P, M


def material_tangents(U, p):
    """Matrix forms of ``d2psi/dU dU`` and ``d2psi/dG dG``.

    The mixed blocks vanish identically for this energy and are not returned.
    """
    U = np.asarray(U, dtype=float)
    lnj = _log_det(U)
    uit = np.swapaxes(np.linalg.inv(U), -1, -2)
    eye = np.broadcast_to(np.eye(3), U.shape)
    c1 = (
        (p.mu + p.eta) * product4("odot", eye, eye)
        + p.lam * product4("otimes", uit, uit)
        - p.eta * product4("boxtimes", eye, eye)
        - (p.lam * lnj - p.mu)[..., None, None] * product4("boxtimes", uit, uit)
    )
    c4 = p.couple_modulus * product4("odot", eye, eye)
    return c1, c4


def pushforward_tangents(c_tilde, R, q_inv):
    """``C_iJkL = R_iP R_kQ Qinv_JR Qinv_LS Ctilde_PRQS`` in matrix form."""
    t = kron_map(R, q_inv)
    return t @ c_tilde @ np.swapaxes(t, -1, -2)


def recover_spatial_stresses(P_mat, M_mat, R, F):
    """Cauchy stress and couple stress from the material measures (post-processing)."""
    F = np.asarray(F, dtype=float)
    J = np.linalg.det(F)
    if np.any(J <= 0.0):
        raise InvalidConfigurationError("deformation gradient with non-positive determinant")
    ft = np.swapaxes(F, -1, -2)
    sigma = (R @ P_mat @ ft) / J[..., None, None]
    m = (R @ M_mat @ ft) / J[..., None, None]
    return sigma, m
