"""JSON model configuration: schema, unit handling and model assembly.

Dimensional entries are plain numbers in the default unit of their field
(mm, kPa, mT) or objects ``{"value": x, "unit": "..."}``.  Everything is
converted to SI on ingest.

A configuration either names a built-in benchmark (``geometry.benchmark``)
whose defaults may be overridden, or spells the mesh out explicitly.
"""

import copy
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .benchmarks import GENERATORS, generate_benchmark
from .constitutive import MaterialParams
from .geometry import MeshError
from .magnetics import MagneticProgram
from .mesh import ShellMesh
from .solver import FIELDS, ConfigError, Constraint, Model, SolverOptions

UNITS = {
    "length": {"m": 1.0, "mm": 1e-3, "um": 1e-6},
    "pressure": {"Pa": 1.0, "kPa": 1e3, "MPa": 1e6},
    "flux": {"T": 1.0, "mT": 1e-3},
}
DEFAULT_UNIT = {"length": "mm", "pressure": "kPa", "flux": "mT"}

_QUANTITY = {
    "oneOf": [
        {"type": "number"},
        {
            "type": "object",
            "properties": {"value": {"type": "number"}, "unit": {"type": "string"}},
            "required": ["value", "unit"],
            "additionalProperties": False,
        },
    ]
}
_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}

SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "mpshell model",
    "type": "object",
    "properties": {
        "name": {"type": "string"},
        "material": {
            "type": "object",
            "properties": {
                "lambda": _QUANTITY,
                "mu": _QUANTITY,
                "eta_ratio": {"type": "number", "minimum": 0},
                "length_scale_ratio": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "geometry": {
            "type": "object",
            "properties": {
                "benchmark": {"enum": sorted(GENERATORS)},
                "params": {"type": "object"},
                "length_unit": {"enum": sorted(UNITS["length"])},
                "thickness": _QUANTITY,
                "nodes": {"type": "array", "items": _VEC3, "minItems": 4},
                "elements": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 8, "maxItems": 8},
                },
                "blocks": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            },
            "oneOf": [{"required": ["benchmark"]}, {"required": ["nodes", "elements", "thickness"]}],
            "additionalProperties": False,
        },
        "magnetics": {
            "type": "object",
            "properties": {
                "remnant": {"type": "array", "items": _VEC3},
                "remnant_unit": {"enum": sorted(UNITS["flux"])},
                "direction": _VEC3,
                "max": _QUANTITY,
                "steps": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "constraints": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "kind": {"enum": ["clamp", "symmetry", "fix"]},
                    "nodes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "plane": {
                        "type": "object",
                        "properties": {"axis": {"enum": [0, 1, 2]}, "value": _QUANTITY},
                        "required": ["axis", "value"],
                    },
                    "points": {"type": "array", "items": _VEC3},
                    "axis": {"enum": [0, 1, 2]},
                    "dofs": {"type": "array", "items": {"enum": list(FIELDS)}},
                },
                "required": ["kind"],
                "additionalProperties": False,
            },
        },
        "solver": {
            "type": "object",
            "properties": {
                "max_iter": {"type": "integer", "minimum": 1},
                "tol_rel": {"type": "number", "exclusiveMinimum": 0},
                "tol_abs": {"type": "number", "minimum": 0},
                "min_step": {"type": "number", "exclusiveMinimum": 0},
                "condense": {"type": "boolean"},
                "fix_phi": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
        "output": {
            "type": "object",
            "properties": {
                "probes": {
                    "type": "object",
                    "additionalProperties": {"oneOf": [{"type": "integer", "minimum": 0}, _VEC3]},
                },
                "snapshots": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}},
            },
            "additionalProperties": False,
        },
    },
    "required": ["material", "geometry"],
    "additionalProperties": False,
}


def schema():
    """The published configuration schema (a JSON-serializable dict)."""
    return copy.deepcopy(SCHEMA)


def to_si(value, kind, where):
    """Convert a number or ``{"value", "unit"}`` object of dimension ``kind`` to SI."""
    if isinstance(value, dict):
        unit = value["unit"]
        if unit not in UNITS[kind]:
            raise ConfigError(f"{where}: unit {unit!r} is not a {kind} unit (expected one of {sorted(UNITS[kind])})")
        return float(value["value"]) * UNITS[kind][unit]
    return float(value) * UNITS[kind][DEFAULT_UNIT[kind]]


@dataclass
class ModelConfig:
    """A validated model definition in SI units."""

    name: str
    mesh: ShellMesh
    material: MaterialParams
    block_remnant: np.ndarray
    direction: np.ndarray
    max_flux: float
    constraints: list
    probes: dict
    steps: int = 50
    solver: SolverOptions = field(default_factory=SolverOptions)
    fix_phi: bool = False
    snapshots: list = field(default_factory=lambda: [1.0])
    eta_ratio: float = 0.1
    length_scale_ratio: float = 0.1

    @property
    def program(self):
        return MagneticProgram(self.block_remnant[self.mesh.block], self.direction, self.max_flux)

    def build_model(self):
        try:
            return Model(self.mesh, self.material, self.program, self.constraints, fix_phi=self.fix_phi,
                         probes=dict(self.probes))
        except MeshError as exc:
            raise ConfigError(str(exc)) from None

    def solver_options(self):
        opt = copy.copy(self.solver)
        opt.steps = self.steps
        return opt

    def to_dict(self):
        """Explicit (mesh-level) configuration in default units."""
        mat = self.material
        return {
            "name": self.name,
            "material": {
                "lambda": mat.lam / 1e3,
                "mu": mat.mu / 1e3,
                "eta_ratio": self.eta_ratio,
                "length_scale_ratio": self.length_scale_ratio,
            },
            "geometry": {
                "thickness": self.mesh.thickness / 1e-3,
                "nodes": (self.mesh.nodes / 1e-3).tolist(),
                "elements": self.mesh.elements.tolist(),
                "blocks": self.mesh.block.tolist(),
            },
            "magnetics": {
                "remnant": (self.block_remnant / 1e-3).tolist(),
                "direction": self.direction.tolist(),
                "max": self.max_flux / 1e-3,
                "steps": self.steps,
            },
            "constraints": [_constraint_to_dict(c) for c in self.constraints],
            "solver": {
                "max_iter": self.solver.max_iter,
                "tol_rel": self.solver.tol_rel,
                "tol_abs": self.solver.tol_abs,
                "min_step": self.solver.min_step,
                "condense": self.solver.condense,
                "fix_phi": self.fix_phi,
            },
            "output": {"probes": {k: int(v) for k, v in self.probes.items()}, "snapshots": list(self.snapshots)},
        }

    def canonical_hash(self):
        """SHA-256 of the explicit form with floats rounded to 12 significant digits."""
        text = json.dumps(_round(self.to_dict()), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round(v) for v in obj]
    return obj


def _constraint_to_dict(c):
    d = {"kind": c.kind, "nodes": [int(n) for n in c.nodes]}
    if c.kind == "symmetry":
        d["axis"] = int(c.axis)
    if c.kind == "fix":
        d["dofs"] = list(c.dofs)
    return d


def _select_nodes(mesh, item, where):
    nodes = []
    if "nodes" in item:
        nodes.extend(item["nodes"])
    if "plane" in item:
        value = to_si(item["plane"]["value"], "length", where + ".plane.value")
        sel = mesh.nodes_on_plane(item["plane"]["axis"], value)
        if sel.size == 0:
            raise ConfigError(f"{where}: plane selects no nodes")
        nodes.extend(sel.tolist())
    for p in item.get("points", []):
        try:
            nodes.append(mesh.nearest_node(np.asarray(p, dtype=float) * 1e-3))
        except MeshError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    if not nodes:
        raise ConfigError(f"{where}: constraint selects no nodes")
    return np.unique(np.asarray(nodes, dtype=np.int64))


def _parse_constraints(mesh, items):
    out = []
    for k, item in enumerate(items):
        where = f"constraints[{k}]"
        kind = item["kind"]
        nodes = _select_nodes(mesh, item, where)
        if nodes.max() >= mesh.n_nodes:
            raise ConfigError(f"{where}: node index out of range")
        if kind == "symmetry":
            axis = item.get("axis", item.get("plane", {}).get("axis"))
            if axis is None:
                raise ConfigError(f"{where}: symmetry needs an axis")
            out.append(Constraint("symmetry", nodes, axis=int(axis)))
        elif kind == "fix":
            if not item.get("dofs"):
                raise ConfigError(f"{where}: fix needs a non-empty 'dofs' list")
            out.append(Constraint("fix", nodes, dofs=tuple(item["dofs"])))
        else:
            out.append(Constraint("clamp", nodes))
    return out


def parse_config(source):
    """Validate and convert a configuration (path, JSON text or dict) to :class:`ModelConfig`."""
    if isinstance(source, dict):
        raw = copy.deepcopy(source)
    else:
        text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        path = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"{path}: {e.message}")

    mat = raw["material"]
    geo = raw["geometry"]
    mag = raw.get("magnetics", {})
    sol = raw.get("solver", {})
    out = raw.get("output", {})
    if "mu" not in mat:
        raise ConfigError("material.mu is required")
    eta_ratio = mat.get("eta_ratio", 0.1)
    ls_ratio = mat.get("length_scale_ratio", 0.1)

    bench = None
    if "benchmark" in geo:
        params = dict(geo.get("params", {}))
        bench = generate_benchmark(geo["benchmark"], **params)
        mesh = bench.mesh
    else:
        unit = UNITS["length"][geo.get("length_unit", "mm")]
        thickness = to_si(geo["thickness"], "length", "geometry.thickness")
        if not thickness > 0:
            raise ConfigError("geometry.thickness must be positive")
        if np.max(geo["elements"]) >= len(geo["nodes"]):
            raise ConfigError("geometry.elements: node index out of range")
        try:
            mesh = ShellMesh(np.asarray(geo["nodes"], dtype=float) * unit, np.asarray(geo["elements"]), thickness,
                             block=np.asarray(geo["blocks"]) if "blocks" in geo else None)
        except MeshError as exc:
            raise ConfigError(f"geometry: {exc}") from None

    mu = to_si(mat["mu"], "pressure", "material.mu")
    if "lambda" in mat:
        lam = to_si(mat["lambda"], "pressure", "material.lambda")
    elif bench is not None:
        lam = bench.lam
    else:
        raise ConfigError("material.lambda is required")
    try:
        material = MaterialParams.calibrated(lam, mu, mesh.thickness, eta_ratio, ls_ratio)
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from None

    if "remnant" in mag:
        runit = UNITS["flux"][mag.get("remnant_unit", "mT")]
        block_remnant = np.asarray(mag["remnant"], dtype=float) * runit
    elif bench is not None:
        block_remnant = bench.block_remnant
    else:
        raise ConfigError("magnetics.remnant is required for an explicit mesh")
    if mesh.block.max() >= len(block_remnant):
        raise ConfigError("magnetics.remnant must list one vector per block")
    direction = np.asarray(mag.get("direction", bench.direction if bench else [0, 0, 1]), dtype=float)
    if not np.linalg.norm(direction) > 0:
        raise ConfigError("magnetics.direction must be nonzero")
    direction = direction / np.linalg.norm(direction)
    if "max" in mag:
        max_flux = to_si(mag["max"], "flux", "magnetics.max")
    elif bench is not None:
        max_flux = bench.max_flux
    else:
        raise ConfigError("magnetics.max is required for an explicit mesh")

    if "constraints" in raw:
        constraints = _parse_constraints(mesh, raw["constraints"])
    else:
        constraints = bench.constraints if bench is not None else []

    probes = dict(bench.probes) if bench is not None else {}
    for name, p in out.get("probes", {}).items():
        if isinstance(p, int):
            if p >= mesh.n_nodes:
                raise ConfigError(f"output.probes.{name}: node index out of range")
            probes[name] = p
        else:
            try:
                probes[name] = mesh.nearest_node(np.asarray(p, dtype=float) * 1e-3)
            except MeshError as exc:
                raise ConfigError(f"output.probes.{name}: {exc}") from None

    options = SolverOptions(
        max_iter=sol.get("max_iter", 25),
        tol_rel=sol.get("tol_rel", 1e-8),
        tol_abs=sol.get("tol_abs", 0.0),
        min_step=sol.get("min_step", 1e-5),
        condense=sol.get("condense", True),
    )
    return ModelConfig(
        name=raw.get("name", geo.get("benchmark", "model")),
        mesh=mesh,
        material=material,
        block_remnant=block_remnant,
        direction=direction,
        max_flux=max_flux,
        constraints=constraints,
        probes=probes,
        steps=mag.get("steps", 50),
        solver=options,
        fix_phi=sol.get("fix_phi", False),
        snapshots=sorted(out.get("snapshots", [1.0])),
        eta_ratio=eta_ratio,
        length_scale_ratio=ls_ratio,
    )


def benchmark_config(name, **params):
    """Configuration dict for a built-in benchmark with its default material."""
    b = generate_benchmark(name, **params)
    return {
        "name": name,
        "material": {"lambda": b.lam / 1e3, "mu": b.mu / 1e3},
        "geometry": {"benchmark": name, "params": params},
    }
