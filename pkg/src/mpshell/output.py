"""Result records, load-curve CSV files and legacy VTK snapshots."""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .magnetics import MU0

CURVE_HEADER = ["step", "B_ext_mT", "nondim_load", "probe", "u1_mm", "u2_mm", "u3_mm"]
VTK_QUADRATIC_QUAD = 23


def nondimensional_load(bext, brem, mu):
    """``10^3 |B_ext| |B_rem| / (mu mu0)`` from SI magnitudes."""
    return 1e3 * abs(bext) * abs(brem) / (mu * MU0)


@dataclass
class ResultRecord:
    """One converged load level."""

    step: int
    load: float
    bext_mT: float
    nondim_load: float
    probes: dict  # name -> (3,) displacement in mm
    snapshot: str = None

    def rows(self):
        for name, u in self.probes.items():
            yield [self.step, f"{self.bext_mT:.10g}", f"{self.nondim_load:.10g}", name] + [f"{x:.10g}" for x in u]


class CurveWriter:
    """Streams result records to a CSV file, one row per probe and step."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="")
        self._w = csv.writer(self._fh)
        self._w.writerow(CURVE_HEADER)
        self._fh.flush()

    def write(self, record):
        for row in record.rows():
            self._w.writerow(row)
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_curve(path):
    """Parse a curve CSV into a dict ``probe -> array (n, 6)`` of (step, B, load, u1, u2, u3)."""
    out = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CURVE_HEADER:
            raise ValueError(f"unexpected curve header {header}")
        for row in reader:
            vals = [float(row[0]), float(row[1]), float(row[2])] + [float(v) for v in row[4:]]
            out.setdefault(row[3], []).append(vals)
    return {k: np.array(v) for k, v in out.items()}


def write_vtk(path, mesh, state, title="mpshell snapshot"):
    """Legacy ASCII VTK unstructured grid of the reference mesh.

    Points are in mm; point data ``u`` (mm) and ``theta`` (rad).  Mid-side
    nodes carry no rotation and get the average of their edge corners.
    """
    nodes = mesh.nodes * 1e3
    theta = _fill_midside(mesh, state.theta)
    ne = mesh.n_elements
    lines = [
        "# vtk DataFile Version 3.0",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {mesh.n_nodes} double",
    ]
    lines += [f"{x:.10g} {y:.10g} {z:.10g}" for x, y, z in nodes]
    lines.append(f"CELLS {ne} {ne * 9}")
    lines += ["8 " + " ".join(str(int(n)) for n in el) for el in mesh.elements]
    lines.append(f"CELL_TYPES {ne}")
    lines += [str(VTK_QUADRATIC_QUAD)] * ne
    lines.append(f"POINT_DATA {mesh.n_nodes}")
    lines.append("VECTORS u double")
    lines += [f"{a:.10g} {b:.10g} {c:.10g}" for a, b, c in state.u * 1e3]
    lines.append("VECTORS theta double")
    lines += [f"{a:.10g} {b:.10g} {c:.10g}" for a, b, c in theta]
    Path(path).write_text("\n".join(lines) + "\n")


def _fill_midside(mesh, corner_field):
    out = np.array(corner_field, dtype=float, copy=True)
    edges = [(4, 0, 1), (5, 1, 2), (6, 2, 3), (7, 3, 0)]
    for m, a, b in edges:
        out[mesh.elements[:, m]] = 0.5 * (corner_field[mesh.elements[:, a]] + corner_field[mesh.elements[:, b]])
    return out


def write_results(records, snapshots, outdir, mesh=None):
    """Write ``curve.csv`` and the VTK snapshots ``{name: state}`` into ``outdir``."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with CurveWriter(outdir / "curve.csv") as w:
        for r in records:
            w.write(r)
    paths = []
    for name, state in snapshots.items():
        p = outdir / f"{name}.vtk"
        write_vtk(p, mesh, state)
        paths.append(p)
    return paths


@dataclass
class RunResult:
    records: list
    iteration_log: list = field(default_factory=list)
    states: dict = field(default_factory=dict)

    def probe(self, name):
        """``(n_steps, 3)`` displacement history (mm) of a probe."""
        return np.array([r.probes[name] for r in self.records])
