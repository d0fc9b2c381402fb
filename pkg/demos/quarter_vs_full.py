"""Check a quarter-symmetry benchmark against its unfolded full model.

The thin cross is modelled on a quarter with symmetry planes.  Mirroring
the mesh twice gives the full cross; pinning the in-plane rigid motions
(the symmetry planes no longer do that) the two must agree.
"""

import numpy as np

from mpshell.benchmarks import cross, unfold
from mpshell.constitutive import MaterialParams
from mpshell.magnetics import MagneticProgram
from mpshell.solver import Constraint, Model, SolverOptions, solve


def tip_displacements(b, extra=()):
    mat = MaterialParams.calibrated(b.lam, b.mu, b.mesh.thickness)
    model = Model(b.mesh, mat, MagneticProgram(b.remnant, b.direction, b.max_flux), b.constraints + list(extra))
    results, _ = solve(model, SolverOptions(steps=8))
    u = results[-1].state.u * 1e3
    return {k: u[n] for k, n in b.probes.items()}


quarter = cross(n_per_mm=0.5)
full = unfold(unfold(quarter, 0), 1)
pins = [Constraint("fix", [full.probes["C"]], dofs=("u1", "u2")), Constraint("fix", [full.probes["A"]], dofs=("u2",))]
print(f"quarter: {quarter.mesh.n_elements} elements, full: {full.mesh.n_elements} elements")
uq = tip_displacements(quarter)
uf = tip_displacements(full, pins)
for k in uq:
    print(f"{k}: quarter {np.round(uq[k], 4)}  full {np.round(uf[k], 4)}")
