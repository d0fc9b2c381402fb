"""Run a configured model through the load schedule and emit results."""

import logging
from pathlib import Path

import numpy as np

from .output import CurveWriter, ResultRecord, RunResult, nondimensional_load, write_vtk
from .solver import LoadStepResult, solve

log = logging.getLogger(__name__)


def load_targets(steps, snapshots=()):
    """Uniform load levels merged with the requested snapshot levels."""
    grid = np.linspace(0.0, 1.0, steps + 1)[1:]
    extra = [s for s in snapshots if s > 0.0]
    return np.unique(np.round(np.concatenate([grid, extra]), 12))


def run(cfg, outdir=None, keep_states=False):
    """Solve ``cfg`` (a :class:`~mpshell.config.ModelConfig`).

    With ``outdir`` the curve CSV, iteration log and VTK snapshots are
    streamed there; records reached before a failure stay on disk.
    """
    model = cfg.build_model()
    opt = cfg.solver_options()
    targets = load_targets(cfg.steps, cfg.snapshots)
    brem = float(np.linalg.norm(cfg.block_remnant, axis=1).max())
    writer = None
    if outdir is not None:
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        writer = CurveWriter(outdir / "curve.csv")
    result = RunResult(records=[])
    snaps = {round(s, 12) for s in cfg.snapshots}

    def on_level(level):
        load = level.load
        bext = load * cfg.max_flux
        rec = ResultRecord(
            step=len(result.records),
            load=load,
            bext_mT=abs(bext) * 1e3,
            nondim_load=nondimensional_load(bext, brem, cfg.material.mu),
            probes={k: level.state.u[n] * 1e3 for k, n in cfg.probes.items()},
        )
        if outdir is not None and round(load, 12) in snaps:
            path = outdir / f"snapshot_{load:.4f}.vtk"
            write_vtk(path, cfg.mesh, level.state, title=f"{cfg.name} load factor {load:.6g}")
            rec.snapshot = str(path)
        if keep_states:
            result.states[load] = level.state
        result.records.append(rec)
        if writer is not None:
            writer.write(rec)
        log.info("load %.4f  B_ext %.4g mT  iterations %d", load, rec.bext_mT, level.iterations)

    # the unloaded reference state opens the curve
    on_level(LoadStepResult(load=0.0, state=model.initial_state(), iterations=0))
    try:
        solve(model, opt, targets=targets, callback=on_level, log_lines=result.iteration_log)
    finally:
        if writer is not None:
            writer.close()
        if outdir is not None and result.iteration_log:
            (outdir / "iterations.log").write_text("step iteration residual load\n" + "\n".join(result.iteration_log) + "\n")
    return result
