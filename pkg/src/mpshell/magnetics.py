"""Hard-magnetic loading: remnant flux push-forward and magnetic body couple.

All quantities are SI (tesla, pascal).  The applied flux is uniform in
space, so the body couple per unit reference volume is

    p* = (1/mu0) (F B_rem) x B_ext

with ``B_rem`` the referential remnant flux.  Its work-conjugate is the
micro-rotation, so the element load vector only fills rotation slots.
"""

from dataclasses import dataclass, field

import numpy as np

from .rotation import InvalidConfigurationError
from .tensor_core import LEVI_CIVITA

MU0 = 4.0e-7 * np.pi


@dataclass
class MagneticProgram:
    """Per-element remnant flux and the applied-flux schedule.

    ``remnant`` is ``(ne, 3)`` in tesla, piecewise constant per element.
    The applied flux at load factor ``s`` is ``s * max_magnitude * direction``.
    """

    remnant: np.ndarray
    direction: np.ndarray
    max_magnitude: float
    schedule: list = field(default_factory=list)

    def __post_init__(self):
        self.remnant = np.asarray(self.remnant, dtype=float)
        d = np.asarray(self.direction, dtype=float)
        n = np.linalg.norm(d)
        if n == 0.0:
            raise ValueError("external flux direction must be nonzero")
        self.direction = d / n

    def external(self, load_factor):
        return load_factor * self.max_magnitude * self.direction

    def remnant_magnitude(self):
        mags = np.linalg.norm(self.remnant, axis=-1)
        return float(mags.max()) if mags.size else 0.0


def remnant_current(F, brem):
    """Spatial remnant flux ``J^-1 F B_rem``."""
    F = np.asarray(F, dtype=float)
    J = np.linalg.det(F)
    if np.any(J <= 0.0):
        raise InvalidConfigurationError("deformation gradient with non-positive determinant")
    return np.einsum("...ij,...j->...i", F, brem) / J[..., None]


def body_couple(F, brem, bext):
    """Magnetic body couple per unit reference volume (N/m^2)."""
    fb = np.einsum("...ij,...j->...i", np.asarray(F, dtype=float), np.asarray(brem, dtype=float))
    return np.cross(fb, np.broadcast_to(bext, fb.shape)) / MU0


def couple_operator(dfstar, q_inv, brem, bext):
    """Linear map from DOF increments to body-couple increments.

    ``dfstar`` is ``(..., 3, 3, n)`` (increment of F* per DOF); returns
    ``(..., 3, n)`` with column b equal to ``(dF*_b Q^-1 B_rem) x B_ext / mu0``.
    """
    v = np.einsum("...jk,...k->...j", q_inv, brem)
    x = np.einsum("...kjn,...j->...kn", dfstar, v)
    return np.einsum("ijk,...jn,k->...in", LEVI_CIVITA, x, bext) / MU0


def external_force(rot_op, couple, weights):
    """Quadrature of ``rot_op^T p*`` (rotation slots only).

    ``rot_op`` is ``(..., 3, n)`` mapping DOFs to the rotation pseudo-vector
    at the point, ``couple`` is ``(..., 3)``, ``weights`` is ``(...)``.
    Returns the summed ``(n,)`` or batched vector over the point axes given.
    """
    return np.einsum("...in,...i,...->...n", rot_op, couple, weights)


def load_stiffness(rot_op, couple_op, weights):
    """Quadrature of ``rot_op^T couple_op`` (unsymmetric)."""
    return np.einsum("...ia,...ib,...->...ab", rot_op, couple_op, weights, optimize=True)
