"""Finite-difference audit of the element tangent on a curved element.

The consistent tangent contains material, geometric and magnetic load
parts.  Central differences of the residual, with steps scaled to each
DOF's units, must reproduce it to round-off.
"""

import numpy as np

from mpshell.benchmarks import cylinder
from mpshell.constitutive import MaterialParams
from mpshell.element import ALPHA_SLOTS, N_TOTAL, PHI_SLOTS, T_SLOTS, ElementSet, ElementState, tangent_check

b = cylinder(n_circ=8, n_axial=4, n_blocks=8)
mesh = b.mesh
es = ElementSet(mesh.element_coords()[:1], mesh.element_directors()[:1], mesh.thickness)
mat = MaterialParams.calibrated(b.lam, b.mu, mesh.thickness)
lc = np.sqrt(mesh.area() / mesh.n_elements)
h = mesh.thickness
rng = np.random.default_rng(1)

steps = np.full(N_TOTAL, 1e-6 * lc)
steps[T_SLOTS.ravel()] = 1e-6
steps[PHI_SLOTS] = 1e-6 / h
steps[ALPHA_SLOTS] = 1e-6 * lc

for trial in range(5):
    st = ElementState(
        u=rng.normal(0, 0.02 * lc, (1, 8, 3)),
        w=rng.normal(0, 0.02, (1, 4, 3)) * h,
        theta=rng.normal(0, 0.4, (1, 4, 3)),
        phi=rng.normal(0, 0.02 / h, (1, 4)),
        alpha=rng.normal(0, 0.01, (1, 6)) * lc,
    )
    err, k, _ = tangent_check(es, st, mat, b.remnant[:1], b.max_flux * b.direction, steps)
    asym = np.abs(k[0] - k[0].T).max() / np.abs(k[0]).max()
    print(f"state {trial}: max relative error {err:.2e}, relative asymmetry {asym:.2e}")
