"""Global DOF bookkeeping, sparse assembly and load-stepped Newton iteration.

Each corner node carries ten unknowns ``(u1, u2, u3, w1, w2, w3, t1, t2,
t3, phi)``; mid-side nodes carry the displacement only.  Displacements,
director increments and the thickness stretch are updated additively, the
micro-rotations multiplicatively.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .constitutive import MaterialParams
from .element import (
    N_NODAL,
    PHI_SLOTS,
    T_SLOTS,
    U_SLOTS,
    W_SLOTS,
    ElementSet,
    ElementState,
    SingularEasBlock,
    condense_eas,
    evaluate,
)
from .magnetics import MagneticProgram
from .rotation import InvalidConfigurationError, RotationLimitError, lambda_tensor, update_rotation

log = logging.getLogger(__name__)

FIELDS = ("u1", "u2", "u3", "w1", "w2", "w3", "t1", "t2", "t3", "phi")
_FIELD_INDEX = {name: i for i, name in enumerate(FIELDS)}


class ConfigError(ValueError):
    """Invalid model definition (constraints, parameters, units)."""


class ConvergenceError(RuntimeError):
    """Load stepping failed below the minimum step size."""


class StepFailure(ArithmeticError):
    """A load increment could not be completed; the step is cut."""


@dataclass
class Constraint:
    """Homogeneous Dirichlet condition on a node set.

    ``kind`` is ``"clamp"`` (all DOFs), ``"symmetry"`` (plane with unit
    normal along coordinate ``axis``) or ``"fix"`` (named DOFs, see
    :data:`FIELDS`).
    """

    kind: str
    nodes: np.ndarray
    axis: int = None
    dofs: tuple = ()


def _constraint_mask(c, n_nodes):
    mask = np.zeros((n_nodes, len(FIELDS)), dtype=bool)
    nodes = np.asarray(c.nodes, dtype=np.int64)
    if nodes.size == 0:
        raise ConfigError(f"{c.kind} constraint selects no nodes")
    if nodes.min() < 0 or nodes.max() >= n_nodes:
        raise ConfigError(f"{c.kind} constraint references a missing node")
    if c.kind == "clamp":
        mask[nodes] = True
    elif c.kind == "symmetry":
        if c.axis not in (0, 1, 2):
            raise ConfigError("symmetry planes must be normal to a coordinate axis")
        tangent = [k for k in range(3) if k != c.axis]
        cols = [c.axis, 3 + c.axis] + [6 + k for k in tangent]
        mask[np.ix_(nodes, cols)] = True
    elif c.kind == "fix":
        try:
            cols = [_FIELD_INDEX[d] for d in c.dofs]
        except KeyError as exc:
            raise ConfigError(f"unknown DOF name {exc.args[0]!r}") from None
        mask[np.ix_(nodes, cols)] = True
    else:
        raise ConfigError(f"unknown constraint kind {c.kind!r}")
    return mask


class DofMap:
    """Equation numbers of the free nodal DOFs.

    ``eq[node, field]`` is the global equation number, or -1 for absent
    (mid-side ``w``, ``theta``, ``phi``) and constrained entries.
    """

    def __init__(self, mesh, constraints=(), fix_phi=False):
        nn = mesh.n_nodes
        present = np.zeros((nn, len(FIELDS)), dtype=bool)
        present[:, :3] = True
        present[mesh.corner_mask, 3:] = True
        fixed = np.zeros_like(present)
        for c in constraints:
            m = _constraint_mask(c, nn)
            if c.kind == "fix" and np.any(m & ~present):
                raise ConfigError("constraint fixes a DOF that the node does not carry")
            fixed |= m
        if fix_phi:
            fixed[:, 9] = True
        self.present = present
        self.fixed = fixed & present
        free = present & ~fixed
        self.eq = -np.ones((nn, len(FIELDS)), dtype=np.int64)
        self.eq[free] = np.arange(free.sum())
        self.n_free = int(free.sum())
        self.element_eq = self._element_map(mesh.elements)

    def _element_map(self, elements):
        ne = len(elements)
        out = np.empty((ne, N_NODAL), dtype=np.int64)
        for i in range(3):
            out[:, U_SLOTS[i]] = self.eq[elements, i]
            out[:, W_SLOTS[i]] = self.eq[elements[:, :4], 3 + i]
            out[:, T_SLOTS[i]] = self.eq[elements[:, :4], 6 + i]
        out[:, PHI_SLOTS] = self.eq[elements[:, :4], 9]
        return out

    def scatter(self, x):
        """Global free vector -> ``(n_nodes, 10)`` nodal array (zeros where fixed)."""
        out = np.zeros(self.eq.shape)
        mask = self.eq >= 0
        out[mask] = x[self.eq[mask]]
        return out


def apply_constraints(mesh, constraints, fix_phi=False):
    """Build the :class:`DofMap` that eliminates the constrained DOFs."""
    return DofMap(mesh, constraints, fix_phi=fix_phi)


@dataclass
class SystemState:
    """Nodal fields, EAS parameters and load factor of the whole model."""

    u: np.ndarray
    w: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    alpha: np.ndarray
    load: float = 0.0

    @classmethod
    def initial(cls, n_nodes, n_elements):
        z = np.zeros((n_nodes, 3))
        return cls(z.copy(), z.copy(), z.copy(), np.zeros(n_nodes), np.zeros((n_elements, 6)), 0.0)

    def copy(self):
        return SystemState(self.u.copy(), self.w.copy(), self.theta.copy(), self.phi.copy(), self.alpha.copy(), self.load)

    def gather(self, elements):
        corners = elements[:, :4]
        return ElementState(
            u=self.u[elements], w=self.w[corners], theta=self.theta[corners], phi=self.phi[corners], alpha=self.alpha
        )


@dataclass
class SolverOptions:
    steps: int = 50
    max_iter: int = 25
    tol_rel: float = 1e-8
    tol_abs: float = 0.0
    min_step: float = 1e-5
    fast_iterations: int = 6
    condense: bool = True


@dataclass
class IterationRecord:
    step: int
    iteration: int
    residual: float
    load: float

    def line(self):
        return f"{self.step} {self.iteration} {self.residual:.6e} {self.load:.6f}"


@dataclass
class Model:
    """A meshed, constrained and loaded shell problem."""

    mesh: object
    material: MaterialParams
    program: MagneticProgram = None
    constraints: list = field(default_factory=list)
    fix_phi: bool = False
    probes: dict = field(default_factory=dict)

    def __post_init__(self):
        self.elements = ElementSet(self.mesh.element_coords(), self.mesh.element_directors(), self.mesh.thickness)
        self.dofs = DofMap(self.mesh, self.constraints, fix_phi=self.fix_phi)
        if self.program is not None and len(self.program.remnant) != self.mesh.n_elements:
            raise ConfigError("remnant flux must be given per element")

    def initial_state(self):
        return SystemState.initial(self.mesh.n_nodes, self.mesh.n_elements)

    def bext(self, load):
        if self.program is None:
            return None
        return self.program.external(load)

    def force_scale(self):
        return self.material.mu * self.mesh.thickness * np.sqrt(self.mesh.area())

    def element_results(self, state, load, tangent=True):
        remnant = None if self.program is None else self.program.remnant
        return evaluate(self.elements, state.gather(self.mesh.elements), self.material, remnant, self.bext(load), tangent)


def _spin_columns(k, theta_corners):
    """Right-multiply the rotation columns by ``Lambda(theta_I)^-1``.

    Turns the tangent with respect to additive nodal pseudo-vector changes
    into the tangent with respect to spatial spin increments, which are
    then composed multiplicatively.
    """
    inv = np.linalg.inv(lambda_tensor(theta_corners))  # (ne, 4, 3, 3)
    k = k.copy()
    cols = k[:, :, T_SLOTS]  # (ne, n, 3, 4)
    k[:, :, T_SLOTS] = np.einsum("enjJ,eJjk->enkJ", cols, inv)
    return k


def assemble(model, state, load=None, condense=True):
    """Assemble the reduced tangent and residual at ``state``.

    Returns ``(K, R, aux)`` where ``K`` is CSC, ``R = F_int - F_ext`` on the
    free DOFs and ``aux`` carries data for the alpha recovery.  Rotation
    columns of ``K`` refer to spin increments.
    """
    load = state.load if load is None else load
    res = model.element_results(state, load, tangent=True)
    emap = model.dofs.element_eq
    n = model.dofs.n_free
    ne = model.mesh.n_elements
    k = _spin_columns(res.tangent, state.theta[model.mesh.elements[:, :4]])
    r = res.residual
    f_ext = _assemble_vector(res.f_ext[:, :N_NODAL], emap, n)
    aux = {"f_ext": f_ext, "r_alpha": r[:, N_NODAL:], "energy": res.energy.sum()}
    if condense:
        cond = condense_eas(k, r)
        K = _assemble_matrix(cond.k, emap, n)
        R = _assemble_vector(cond.r, emap, n)
        aux["condensed"] = cond
        aux["residual_v"] = _assemble_vector(r[:, :N_NODAL], emap, n)
        return K, R, aux
    amap = n + np.arange(ne * 6).reshape(ne, 6)
    full = np.concatenate([emap, amap], axis=1)
    K = _assemble_matrix(k, full, n + 6 * ne)
    R = _assemble_vector(r, full, n + 6 * ne)
    aux["residual_v"] = R[:n]
    return K, R, aux


def _assemble_matrix(ke, emap, n):
    m = emap.shape[1]
    rows = np.broadcast_to(emap[:, :, None], (len(emap), m, m))
    cols = np.broadcast_to(emap[:, None, :], (len(emap), m, m))
    mask = (rows >= 0) & (cols >= 0)
    K = sp.coo_matrix((ke[mask], (rows[mask], cols[mask])), shape=(n, n))
    return K.tocsc()


def _assemble_vector(fe, emap, n):
    out = np.zeros(n)
    mask = emap >= 0
    np.add.at(out, emap[mask], fe[mask])
    return out


def linear_solve(K, rhs):
    """Direct sparse LU solve of the (unsymmetric) reduced system."""
    K = sp.csc_matrix(K)
    if K.shape[0] == 0:
        return np.zeros(0)
    try:
        lu = spla.splu(K)
    except RuntimeError as exc:
        raise StepFailure(f"singular tangent: {exc}") from None
    x = lu.solve(np.asarray(rhs, dtype=float))
    if not np.all(np.isfinite(x)):
        raise StepFailure("non-finite solution of the linear system")
    return x


def _apply_increment(model, state, dx, cond=None):
    """New state after a Newton correction ``dx`` (spin increments on rotations)."""
    dofs = model.dofs
    n = dofs.n_free
    nodal = dofs.scatter(dx[:n])
    new = state.copy()
    new.u += nodal[:, :3]
    new.w += nodal[:, 3:6]
    corners = model.mesh.corner_mask
    new.theta[corners] = update_rotation(state.theta[corners], nodal[corners, 6:9])
    new.phi += nodal[:, 9]
    if cond is not None:
        emap = dofs.element_eq
        dv = np.where(emap >= 0, dx[np.maximum(emap, 0)], 0.0)
        new.alpha += cond.recover_alpha(dv)
    else:
        new.alpha += dx[n:].reshape(-1, 6)
    return new


def newton_solve(model, state, load, options=None, step=0, log_lines=None):
    """Equilibrium iteration at load factor ``load`` starting from ``state``.

    Returns ``(state, records)``; raises :class:`StepFailure` when the
    iteration does not converge within ``options.max_iter``.
    """
    opt = options or SolverOptions()
    records = []
    condense = opt.condense
    cur = state.copy()
    cur.load = load
    for it in range(opt.max_iter + 1):
        try:
            K, R, aux = assemble(model, cur, load, condense=condense)
        except SingularEasBlock:
            condense = False
            K, R, aux = assemble(model, cur, load, condense=False)
        except (InvalidConfigurationError, np.linalg.LinAlgError) as exc:
            raise StepFailure(str(exc)) from None
        norm = float(np.sqrt(aux["residual_v"] @ aux["residual_v"] + np.sum(aux["r_alpha"] ** 2)))
        ref = max(float(np.linalg.norm(aux["f_ext"])), model.force_scale())
        rec = IterationRecord(step, it, norm, load)
        records.append(rec)
        if log_lines is not None:
            log_lines.append(rec.line())
        log.debug(rec.line())
        if not np.isfinite(norm):
            raise StepFailure("non-finite residual")
        if norm <= opt.tol_rel * ref + opt.tol_abs:
            return cur, records
        if it == opt.max_iter:
            break
        # the residual mixes forces and moments, so divergence is judged
        # against the force scale rather than the previous iterate
        if norm > 1e8 * ref:
            raise StepFailure("diverging residual")
        dx = linear_solve(K, -R)
        try:
            cur = _apply_increment(model, cur, dx, aux.get("condensed") if condense else None)
        except RotationLimitError as exc:
            raise StepFailure(str(exc)) from None
    raise StepFailure(f"no convergence in {opt.max_iter} iterations at load {load:.6g}")


@dataclass
class LoadStepResult:
    load: float
    state: SystemState
    iterations: int


def solve(model, options=None, targets=None, callback=None, state=None, log_lines=None):
    """Load-stepped solution up to load factor 1.

    ``targets`` are the load factors at which converged states are
    reported (default: ``options.steps`` uniform increments).  Between
    targets the step is halved after a failure and doubled after two fast
    successes, never exceeding the distance to the next target.
    ``callback(result)`` is called at every reported target.  Iteration
    log lines are appended to ``log_lines`` when given, so they survive a
    :class:`ConvergenceError`.
    """
    opt = options or SolverOptions()
    if targets is None:
        targets = np.linspace(0.0, 1.0, opt.steps + 1)[1:]
    state = (state or model.initial_state()).copy()
    results = []
    lines = [] if log_lines is None else log_lines
    step_id = 0
    for target in targets:
        remaining = target - state.load
        h = remaining
        fast = 0
        iters = 0
        while state.load < target - 1e-14:
            h = min(h, target - state.load)
            trial = state.load + h
            if target - trial < 1e-12:
                trial = target
            try:
                new, recs = newton_solve(model, state, trial, opt, step=step_id, log_lines=lines)
            except StepFailure as exc:
                log.info("step to load %.6g failed (%s); halving", trial, exc)
                h *= 0.5
                fast = 0
                if h < opt.min_step:
                    raise ConvergenceError(f"load step fell below {opt.min_step:g} at load {state.load:.6g}: {exc}")
                continue
            step_id += 1
            iters += len(recs) - 1
            state = new
            fast = fast + 1 if len(recs) - 1 <= opt.fast_iterations else 0
            if fast >= 2:
                h *= 2.0
                fast = 0
        res = LoadStepResult(load=float(target), state=state.copy(), iterations=iters)
        results.append(res)
        if callback is not None:
            callback(res)
    return results, lines
