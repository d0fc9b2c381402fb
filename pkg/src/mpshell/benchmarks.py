"""Procedural generators for the hard-magnetic shell benchmark problems.

Every generator returns a :class:`Benchmark` holding the mesh, per-block
remnant flux, constraints and probe nodes.  Lengths are given in mm and
flux densities in mT; the returned objects are in SI units.

Quarter models cut the structure along the coordinate planes through its
centre.  Blocks that straddle a cut must carry a remnant flux without a
component normal to it, otherwise the cut would not be a symmetry plane.
"""

from dataclasses import dataclass, field

import numpy as np

from .mesh import ShellMesh, merge_patches, quad_patch
from .solver import ConfigError, Constraint

MM = 1e-3
MT = 1e-3


@dataclass
class Benchmark:
    """Everything needed to set up one benchmark run (SI units)."""

    name: str
    mesh: ShellMesh
    block_remnant: np.ndarray  # (n_blocks, 3) tesla
    direction: np.ndarray
    max_flux: float  # tesla
    lam: float  # Pa
    mu: float  # Pa
    constraints: list
    probes: dict  # name -> node index
    params: dict = field(default_factory=dict)

    @property
    def remnant(self):
        return self.block_remnant[self.mesh.block]


def _tol(*lengths):
    return 1e-6 * max(lengths) * MM


def _clamp(mesh, axis, value):
    return Constraint("clamp", mesh.nodes_on_plane(axis, value))


def _sym(mesh, axis, value=0.0):
    return Constraint("symmetry", mesh.nodes_on_plane(axis, value), axis=axis)


def strip(L=11.0, h=1.1, width=5.0, nx=None, ny=2, remnant_mT=143.0, bext_mT=50.0, lam_kPa=7300.0, mu_kPa=303.0):
    """Cantilever strip clamped at ``X1 = 0``, remnant along ``E1``, field along ``e3``.

    ``nx`` defaults to the converged density for the aspect ratio
    ``L/h`` (10, 15, 30 or 40 elements for AR 10, 17.5, 20.5 and 41).
    """
    if L <= 0 or h <= 0 or width <= 0:
        raise ConfigError("strip dimensions must be positive")
    if nx is None:
        ar = L / h
        nx = 10 if ar < 15 else 15 if ar < 20 else 30 if ar < 30 else 40
    nodes, elems = quad_patch([[0, 0], [L, 0], [L, width], [0, width]], int(nx), int(ny))
    mesh = ShellMesh(nodes * MM, elems, h * MM)
    return Benchmark(
        name="strip",
        mesh=mesh,
        block_remnant=np.array([[remnant_mT * MT, 0.0, 0.0]]),
        direction=np.array([0.0, 0.0, 1.0]),
        max_flux=bext_mT * MT,
        lam=lam_kPa * 1e3,
        mu=mu_kPa * 1e3,
        constraints=[_clamp(mesh, 0, 0.0)],
        probes={"T": mesh.nearest_node([L * MM, 0.5 * width * MM, 0.0])},
        params=dict(L=L, h=h, width=width, nx=int(nx), ny=int(ny)),
    )


def cross(arm=15.0, half_width=3.0, h=0.9, n_per_mm=1.0, remnant_mT=94.0, bext_mT=40.0, lam_kPa=3250.0, mu_kPa=135.0):
    """Quarter of the thin cross of nine square blocks.

    The X1 arm is magnetized along ``+E1`` and the X2 arm along ``-E2``, so
    that the field along ``+e3`` lifts the X1 arm tips and lowers the X2
    arm tips.  The central block straddles both cuts and is magnetized
    along ``E3``.  ``u3`` vanishes at ``D`` (tip of the X2 arm).
    """
    b = half_width
    n = lambda length: max(1, int(round(length * n_per_mm)))  # noqa: E731
    patches = [
        (*quad_patch([[0, 0], [b, 0], [b, b], [0, b]], n(b), n(b)), 0),
        (*quad_patch([[b, 0], [arm, 0], [arm, b], [b, b]], n(arm - b), n(b)), 1),
        (*quad_patch([[0, b], [b, b], [b, arm], [0, arm]], n(b), n(arm - b)), 2),
    ]
    nodes, elems, blocks = merge_patches(patches, _tol(arm))
    mesh = ShellMesh(nodes * MM, elems, h * MM, block=blocks)
    br = remnant_mT * MT
    rem = np.array([[0.0, 0.0, br], [br, 0.0, 0.0], [0.0, -br, 0.0]])
    A, C, D = [mesh.nearest_node(np.array(p) * MM) for p in ([arm, 0, 0], [0, 0, 0], [0, arm, 0])]
    cons = [_sym(mesh, 0), _sym(mesh, 1), Constraint("fix", [D], dofs=("u3",))]
    return Benchmark(
        "cross", mesh, rem, np.array([0.0, 0.0, 1.0]), bext_mT * MT, lam_kPa * 1e3, mu_kPa * 1e3, cons,
        {"A": A, "C": C, "D": D}, dict(arm=arm, half_width=b, h=h, n_per_mm=n_per_mm),
    )


def h_structure(block=6.0, h=0.9, per_block=4, remnant_mT=94.0, bext_mT=-50.0, lam_kPa=3250.0, mu_kPa=135.0):
    """Quarter of the H of fifteen square blocks (legs of five, crossbar of five).

    Crossbar magnetized along ``+E1``, legs along ``+E2``, the junction
    block along ``+E1`` and the central block along ``-E3``.  With the field
    along ``-e3`` the leg tips drop and the crossbar centre ``A`` rises;
    ``u3`` vanishes at the leg corner ``D``.
    """
    s = block
    e = per_block
    half = s / 2
    xbar = 2.5 * s  # half crossbar length measured to the leg
    x1 = xbar + s
    patches = [
        (*quad_patch([[0, 0], [half, 0], [half, half], [0, half]], e // 2, e // 2), 0),
        (*quad_patch([[half, 0], [xbar, 0], [xbar, half], [half, half]], 2 * e, e // 2), 1),
        (*quad_patch([[xbar, 0], [x1, 0], [x1, half], [xbar, half]], e, e // 2), 2),
        (*quad_patch([[xbar, half], [x1, half], [x1, xbar], [xbar, xbar]], e, 2 * e), 3),
    ]
    nodes, elems, blocks = merge_patches(patches, _tol(x1))
    mesh = ShellMesh(nodes * MM, elems, h * MM, block=blocks)
    br = remnant_mT * MT
    rem = np.array([[0, 0, -br], [br, 0, 0], [br, 0, 0], [0, br, 0]], dtype=float)
    A, C, D = [mesh.nearest_node(np.array(p) * MM) for p in ([0, 0, 0], [x1, 0, 0], [x1, xbar, 0])]
    cons = [_sym(mesh, 0), _sym(mesh, 1), Constraint("fix", [D], dofs=("u3",))]
    return Benchmark(
        "h_structure", mesh, rem, np.array([0.0, 0.0, 1.0]), bext_mT * MT,
        lam_kPa * 1e3, mu_kPa * 1e3, cons, {"A": A, "C": C, "D": D}, dict(block=s, h=h, per_block=e),
    )


def hollow_cross(reach=18.0, tip_half=6.0, band=3.0, h=0.41, per_block=6, remnant_mT=102.0, bext_mT=-200.0,
                 lam_kPa=7300.0, mu_kPa=303.0):
    """Quarter of the hollow cross: a band of width ``band`` along the outline of a plus sign.

    The band centreline runs A=(reach, 0), B=(reach, tip_half),
    D=(tip_half, tip_half), F=(tip_half, reach), G=(0, reach); C and E
    are the mid-points of BD and DF.  The six trapezoidal blocks AB, BC,
    CD, DE, EF and FG are magnetized along the band: AB towards A, BC
    towards B, CD towards D, DE towards D, EF towards F and FG towards G.
    Default outline dimensions are estimates and can be overridden.
    """
    a, b, w = reach, tip_half, band
    if not (a > b + w and b > w / 2):
        raise ConfigError("hollow cross needs reach > tip_half + band and tip_half > band/2")
    o, i = w / 2, -w / 2  # outer and inner offsets
    xc = 0.5 * (a + b)
    blocks = [
        [[a + i, 0], [a + o, 0], [a + o, b + o], [a + i, b + i]],
        [[a + i, b + i], [a + o, b + o], [xc, b + o], [xc, b + i]],
        [[xc, b + i], [xc, b + o], [b + o, b + o], [b + i, b + i]],
    ]
    # mirror about the diagonal for DE, EF, FG (reverse to keep orientation)
    mirrored = [[[p[1], p[0]] for p in reversed(q)] for q in reversed(blocks)]
    patches = []
    for k, q in enumerate(blocks + mirrored):
        q = np.array(q, dtype=float)
        e1, e2 = q[1] - q[0], q[3] - q[0]
        cross_z = e1[0] * e2[1] - e1[1] * e2[0]
        if cross_z < 0:
            q = q[[1, 0, 3, 2]]
        patches.append((*quad_patch(q, per_block, per_block), k))
    nodes, elems, bl = merge_patches(patches, _tol(a))
    mesh = ShellMesh(nodes * MM, elems, h * MM, block=bl)
    br = remnant_mT * MT
    rem = br * np.array([[0, -1, 0], [1, 0, 0], [-1, 0, 0], [0, -1, 0], [0, 1, 0], [-1, 0, 0]], dtype=float)
    pts = {"A": [a, 0], "B": [a, b], "C": [xc, b], "D": [b, b], "E": [b, xc], "F": [b, a], "G": [0, a]}
    probes = {k: mesh.nearest_node(np.array([*v, 0.0]) * MM) for k, v in pts.items()}
    cons = [_sym(mesh, 0), _sym(mesh, 1), Constraint("fix", [probes["A"], probes["G"]], dofs=("u3",))]
    return Benchmark(
        "hollow_cross", mesh, rem, np.array([0.0, 0.0, 1.0]), bext_mT * MT, lam_kPa * 1e3, mu_kPa * 1e3, cons,
        probes, dict(reach=a, tip_half=b, band=w, h=h, per_block=per_block),
    )


def cylinder(radius=22.9, length=120.0, h=0.9, n_circ=24, n_axial=20, n_blocks=24, remnant_mT=94.0,
             bext_mT=150.0, lam_kPa=3250.0, mu_kPa=135.0):
    """Quarter of a cylinder with axis along ``X2`` clamped at both ends.

    The model keeps ``X1 >= 0`` and the half length ``0 <= X2 <= L/2``.
    Positions are ``(R cos psi, Y, R sin psi)``; the remnant flux is
    tangent to the section, perpendicular to ``X2`` and has a positive
    ``X3`` component, constant in each of the ``n_blocks`` circumferential
    blocks of the full ring.
    """
    R = radius
    half = length / 2

    def mapping(p):
        psi, y = p[..., 0], p[..., 1]
        return np.stack([R * np.cos(psi), y, R * np.sin(psi)], axis=-1)

    # psi from +90 deg down to -90 deg keeps the normal pointing outwards
    nodes, elems = quad_patch([[np.pi / 2, 0], [-np.pi / 2, 0], [-np.pi / 2, half], [np.pi / 2, half]],
                              n_circ, n_axial, mapping)
    centroid = nodes[elems[:, :4]].mean(axis=1)
    psi_c = np.arctan2(centroid[:, 2], centroid[:, 0])
    width = 2 * np.pi / n_blocks
    blk = np.floor(psi_c / width).astype(int)
    uniq, block_ids = np.unique(blk, return_inverse=True)
    psi_b = (uniq + 0.5) * width
    t = np.stack([-np.sin(psi_b), np.zeros_like(psi_b), np.cos(psi_b)], axis=-1)
    t *= np.sign(t[:, 2:3])
    mesh = ShellMesh(nodes * MM, elems, h * MM, block=block_ids)
    rem = remnant_mT * MT * t
    probes = {
        "A": mesh.nearest_node(np.array([0, half, R]) * MM),
        "B": mesh.nearest_node(np.array([R, half, 0]) * MM),
        "C": mesh.nearest_node(np.array([R / np.sqrt(2), half, R / np.sqrt(2)]) * MM),
    }
    cons = [_clamp(mesh, 1, 0.0), _sym(mesh, 1, half * MM), _sym(mesh, 0, 0.0)]
    return Benchmark(
        "cylinder", mesh, rem, np.array([0.0, 0.0, 1.0]), bext_mT * MT, lam_kPa * 1e3, mu_kPa * 1e3, cons, probes,
        dict(radius=R, length=length, h=h, n_circ=n_circ, n_axial=n_axial),
    )


def gripper(radius=None, arc=12.0, span_deg=30.0, polar_min_deg=15.0, h=0.9, n_width=6, n_length=30,
            remnant_mT=94.0, bext_mT=10.0, lam_kPa=3250.0, mu_kPa=135.0):
    """One arm of the spherical gripper.

    The arm covers azimuths ``+-span/2`` about the X1X3 plane and polar
    angles from ``polar_min`` to ``180 - polar_min``; the arc at the
    smallest polar angle is clamped.  The remnant flux is along the
    meridian tangent ``e_phi`` (direction of increasing polar angle) for
    ``X3 > 0`` and along ``-e_phi`` for ``X3 < 0``.
    """
    span = np.radians(span_deg)
    R = arc / span if radius is None else radius
    p0 = np.radians(polar_min_deg)

    def mapping(p):
        az, pol = p[..., 0], p[..., 1]
        return R * np.stack([np.sin(pol) * np.cos(az), np.sin(pol) * np.sin(az), np.cos(pol)], axis=-1)

    # increasing polar angle then azimuth gives an outward normal
    nodes, elems = quad_patch([[-span / 2, np.pi - p0], [span / 2, np.pi - p0], [span / 2, p0], [-span / 2, p0]],
                              n_width, n_length, mapping)
    centroid = nodes[elems[:, :4]].mean(axis=1)
    blocks = (centroid[:, 2] < 0).astype(int)
    mesh = ShellMesh(nodes * MM, elems, h * MM, block=np.arange(len(elems)))
    r = np.linalg.norm(centroid, axis=1)
    pol = np.arccos(np.clip(centroid[:, 2] / r, -1, 1))
    az = np.arctan2(centroid[:, 1], centroid[:, 0])
    e_phi = np.stack([np.cos(pol) * np.cos(az), np.cos(pol) * np.sin(az), -np.sin(pol)], axis=-1)
    sign = np.where(blocks == 0, 1.0, -1.0)
    rem = remnant_mT * MT * sign[:, None] * e_phi
    top = np.flatnonzero(np.abs(nodes[:, 2] - R * np.cos(p0)) < _tol(R))
    probes = {
        "A": mesh.nearest_node(np.array([R * np.sin(p0), 0, R * np.cos(p0)]) * MM),
        "B": mesh.nearest_node(np.array([R, 0, 0]) * MM),
        "C": mesh.nearest_node(np.array([R * np.sin(p0), 0, -R * np.cos(p0)]) * MM),
    }
    return Benchmark(
        "gripper", mesh, rem, np.array([0.0, 0.0, 1.0]), bext_mT * MT, lam_kPa * 1e3, mu_kPa * 1e3,
        [Constraint("clamp", top)], probes,
        dict(radius=R, span_deg=span_deg, polar_min_deg=polar_min_deg, h=h, n_width=n_width, n_length=n_length),
    )


# node permutation that restores the element orientation after a reflection
_MIRROR_ORDER = np.array([1, 0, 3, 2, 4, 7, 6, 5])


def unfold(bench, axis, value=0.0):
    """Mirror a symmetry-reduced benchmark across the plane ``X[axis] = value``.

    The reflected half carries the remnant flux ``s M B_rem`` where ``M``
    is the reflection and ``s = +1`` (applied field in the plane) or ``-1``
    (field normal to it); any other field direction has no mirror
    symmetry and raises :class:`ConfigError`.  Symmetry conditions on the
    plane are dropped, all other constraints are mirrored.
    """
    M = np.eye(3)
    M[axis, axis] = -1.0
    d = bench.direction
    if np.allclose(M @ d, d):
        sign = 1.0
    elif np.allclose(M @ d, -d):
        sign = -1.0
    else:
        raise ConfigError("the applied field is neither parallel nor normal to the symmetry plane")
    mesh = bench.mesh
    nodes = mesh.nodes
    mirrored = nodes @ M
    mirrored[:, axis] += 2.0 * value
    nb = len(bench.block_remnant)
    tol = 1e-6 * np.ptp(nodes, axis=0).max()
    merged, elems, _ = merge_patches(
        [(nodes, mesh.elements, 0), (mirrored, mesh.elements[:, _MIRROR_ORDER], 1)], tol
    )
    blocks = np.concatenate([mesh.block, mesh.block + nb])
    new_mesh = ShellMesh(merged, elems, mesh.thickness, block=blocks)
    rem = np.concatenate([bench.block_remnant, sign * bench.block_remnant @ M])

    def lookup(points):
        return np.array([new_mesh.nearest_node(p, tol) for p in points], dtype=np.int64)

    cons = []
    for c in bench.constraints:
        pts = nodes[c.nodes]
        on_plane = np.abs(pts[:, axis] - value) <= tol
        if c.kind == "symmetry" and c.axis == axis and np.all(on_plane):
            continue
        mp = pts @ M
        mp[:, axis] += 2.0 * value
        ids = np.unique(np.concatenate([lookup(pts), lookup(mp)]))
        cons.append(Constraint(c.kind, ids, axis=c.axis, dofs=c.dofs))
    probes = {k: new_mesh.nearest_node(nodes[n], tol) for k, n in bench.probes.items()}
    return Benchmark(bench.name, new_mesh, rem, d, bench.max_flux, bench.lam, bench.mu, cons, probes,
                     dict(bench.params, unfolded=bench.params.get("unfolded", ()) + (axis,)))


GENERATORS = {
    "strip": strip,
    "hollow_cross": hollow_cross,
    "cross": cross,
    "h_structure": h_structure,
    "cylinder": cylinder,
    "gripper": gripper,
}


def generate_benchmark(name, **params):
    """Build the named benchmark; unknown names or parameters raise :class:`ConfigError`."""
    try:
        gen = GENERATORS[name]
    except KeyError:
        raise ConfigError(f"unknown benchmark {name!r}; choose from {sorted(GENERATORS)}") from None
    try:
        return gen(**params)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for {name}: {exc}") from None
