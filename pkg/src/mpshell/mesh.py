"""Structured 8-node shell meshes built from mapped quadrilateral patches."""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import MeshError, nodal_directors
from .shape import NODE_XI


@dataclass
class ShellMesh:
    """Nodes, 8-node connectivity and per-element data of a shell mesh.

    Coordinates are in metres.  ``block`` tags every element with the
    index of the magnetized block it belongs to.
    """

    nodes: np.ndarray
    elements: np.ndarray
    thickness: float
    block: np.ndarray = None
    directors: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.elements = np.asarray(self.elements, dtype=np.int64)
        if self.elements.ndim != 2 or self.elements.shape[1] != 8:
            raise MeshError("connectivity must have 8 nodes per element")
        if not self.thickness > 0.0:
            raise MeshError("thickness must be positive")
        if self.block is None:
            self.block = np.zeros(len(self.elements), dtype=np.int64)
        if self.directors is None:
            self.directors = nodal_directors(self.nodes, self.elements)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def corner_mask(self):
        mask = np.zeros(self.n_nodes, dtype=bool)
        mask[self.elements[:, :4].ravel()] = True
        return mask

    def element_coords(self):
        return self.nodes[self.elements]

    def element_directors(self):
        return self.directors[self.elements[:, :4]]

    def area(self):
        """Mid-surface area by 2x2 Gauss quadrature of the surface Jacobian."""
        from .shape import GAUSS_2X2, serendipity

        total = 0.0
        xe = self.element_coords()
        for xi, eta in GAUSS_2X2:
            _, dn = serendipity(xi, eta)
            cov = np.einsum("eIi,Ia->eai", xe, dn)
            total += np.linalg.norm(np.cross(cov[:, 0], cov[:, 1]), axis=1).sum()
        return float(total)

    # node selection helpers
    def nodes_on_plane(self, axis, value, tol=None):
        tol = self._tol(tol)
        return np.flatnonzero(np.abs(self.nodes[:, axis] - value) <= tol)

    def nodes_where(self, predicate):
        return np.flatnonzero(predicate(self.nodes))

    def nearest_node(self, point, tol=None):
        tol = self._tol(tol)
        d = np.linalg.norm(self.nodes - np.asarray(point, dtype=float), axis=1)
        i = int(np.argmin(d))
        if d[i] > tol:
            raise MeshError(f"no node within {tol:g} m of point {tuple(point)}")
        return i

    def _tol(self, tol):
        if tol is not None:
            return tol
        span = np.ptp(self.nodes, axis=0).max() if self.n_nodes else 1.0
        return 1e-8 * max(span, 1e-12)


def quad_patch(corners, nx, ny, mapping=None):
    """Nodes and connectivity of an ``nx`` by ``ny`` patch.

    ``corners`` are four parameter-space points (counter-clockwise); the
    patch is their bilinear image, optionally followed by ``mapping`` from
    parameter space to 3D.  Without a mapping, 2D parameters become the
    X1-X2 plane.
    """
    corners = np.asarray(corners, dtype=float)
    s = np.linspace(-1.0, 1.0, 2 * nx + 1)
    t = np.linspace(-1.0, 1.0, 2 * ny + 1)
    S, T = np.meshgrid(s, t, indexing="ij")
    n = 0.25 * np.stack([(1 - S) * (1 - T), (1 + S) * (1 - T), (1 + S) * (1 + T), (1 - S) * (1 + T)], axis=-1)
    params = n @ corners
    if mapping is None:
        pts = np.concatenate([params, np.zeros(params.shape[:-1] + (3 - params.shape[-1],))], axis=-1)
    else:
        pts = mapping(params)
    grid_id = -np.ones(S.shape, dtype=np.int64)
    keep = ~((np.arange(2 * nx + 1)[:, None] % 2 == 1) & (np.arange(2 * ny + 1)[None, :] % 2 == 1))
    grid_id[keep] = np.arange(keep.sum())
    nodes = pts[keep]
    offs = ((NODE_XI + 1.0)).astype(int)  # local grid offsets 0..2
    elems = np.empty((nx * ny, 8), dtype=np.int64)
    k = 0
    for j in range(ny):
        for i in range(nx):
            elems[k] = grid_id[2 * i + offs[:, 0], 2 * j + offs[:, 1]]
            k += 1
    return nodes, elems


def merge_patches(patches, tol):
    """Glue patches ``[(nodes, elements, block_id), ...]`` by coincident nodes."""
    all_nodes = np.concatenate([p[0] for p in patches])
    offsets = np.cumsum([0] + [len(p[0]) for p in patches])
    tree = cKDTree(all_nodes)
    pairs = tree.query_pairs(tol, output_type="ndarray")
    parent = np.arange(len(all_nodes))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(len(all_nodes))])
    uniq, new_id = np.unique(roots, return_inverse=True)
    nodes = all_nodes[uniq]
    elems = np.concatenate([new_id[p[1] + off] for p, off in zip(patches, offsets[:-1])])
    blocks = np.concatenate([np.full(len(p[1]), p[2], dtype=np.int64) for p in patches])
    return nodes, elems, blocks


def rectangle(lx, ly, nx, ny, origin=(0.0, 0.0)):
    """Flat rectangular patch ``[x0, x0+lx] x [y0, y0+ly]`` in the X1-X2 plane."""
    x0, y0 = origin
    corners = [[x0, y0], [x0 + lx, y0], [x0 + lx, y0 + ly], [x0, y0 + ly]]
    return quad_patch(corners, nx, ny)
