"""Command line entry point.

Exit codes: 0 success, 1 failed tangent check, 2 configuration error,
3 convergence failure, 4 I/O error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .benchmarks import GENERATORS
from .config import benchmark_config, parse_config, schema
from .driver import run
from .element import ALPHA_SLOTS, N_TOTAL, PHI_SLOTS, T_SLOTS, ElementState, tangent_check
from .rotation import InvalidConfigurationError
from .solver import ConfigError, ConvergenceError

EXIT_OK, EXIT_TANGENT, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4


def _param(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _summary(result):
    last = result.records[-1]
    parts = [f"B_ext {last.bext_mT:.4g} mT", f"load {last.nondim_load:.4g}"]
    parts += [f"{k}: u=({u[0]:.4f}, {u[1]:.4f}, {u[2]:.4f}) mm" for k, u in last.probes.items()]
    return "  ".join(parts)


def cmd_run(args):
    cfg = parse_config(args.config)
    result = run(cfg, args.out)
    print(_summary(result))
    return EXIT_OK


def cmd_benchmark(args):
    params = dict(args.param or [])
    raw = benchmark_config(args.name, **params)
    if args.steps is not None:
        raw["magnetics"] = {"steps": args.steps}
    if args.write_config:
        Path(args.write_config).write_text(json.dumps(raw, indent=2) + "\n")
        return EXIT_OK
    cfg = parse_config(raw)
    out = args.out or f"{args.name}_out"
    result = run(cfg, out)
    print(_summary(result))
    return EXIT_OK


def cmd_verify_tangent(args):
    cfg = parse_config(args.config)
    model = cfg.build_model()
    rng = np.random.default_rng(args.seed)
    ne = model.mesh.n_elements
    idx = rng.choice(ne, size=min(args.elements, ne), replace=False)
    es = model.elements.subset(idx)
    lc = np.sqrt(model.mesh.area() / ne)
    h = model.mesh.thickness
    st = ElementState(
        u=rng.normal(0.0, 0.01 * lc, (len(idx), 8, 3)),
        w=rng.normal(0.0, 0.01, (len(idx), 4, 3)) * h,
        theta=rng.normal(0.0, 0.3, (len(idx), 4, 3)),
        phi=rng.normal(0.0, 0.01 / h, (len(idx), 4)),
        alpha=rng.normal(0.0, 0.01, (len(idx), 6)) * 0.5 * lc,  # shear modes carry a length
    )
    steps = np.full(N_TOTAL, 1e-6 * lc)
    steps[T_SLOTS.ravel()] = 1e-6
    steps[PHI_SLOTS] = 1e-6 / h
    steps[ALPHA_SLOTS] = 1e-6 * lc
    remnant = model.program.remnant[idx]
    err, _, _ = tangent_check(es, st, model.material, remnant, model.bext(1.0), steps)
    ok = err <= args.tol
    print(f"elements {idx.tolist()}  max relative tangent error {err:.3e}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_TANGENT


def cmd_schema(args):
    print(json.dumps(schema(), indent=2))
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="mpshell", description="Micropolar shell solver for hard-magnetic soft structures")
    p.add_argument("-v", "--verbose", action="store_true", help="log load steps")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve a JSON model configuration")
    r.add_argument("config", help="path to the configuration file")
    r.add_argument("--out", default="out", help="output directory (default: out)")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("benchmark", help="run a built-in benchmark")
    b.add_argument("name", choices=sorted(GENERATORS))
    b.add_argument("--param", action="append", type=_param, metavar="KEY=VALUE", help="generator parameter")
    b.add_argument("--steps", type=int, help="uniform load steps")
    b.add_argument("--out", help="output directory (default: NAME_out)")
    b.add_argument("--write-config", metavar="PATH", help="write the configuration and exit")
    b.set_defaults(func=cmd_benchmark)

    v = sub.add_parser("verify-tangent", help="finite-difference check of the element tangent")
    v.add_argument("config")
    v.add_argument("--elements", type=int, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-6)
    v.set_defaults(func=cmd_verify_tangent)

    s = sub.add_parser("schema", help="print the configuration JSON schema")
    s.set_defaults(func=cmd_schema)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, InvalidConfigurationError) as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
