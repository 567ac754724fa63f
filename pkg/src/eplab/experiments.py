"""Run, criteria, sweep and plot-data commands on top of the solvers."""

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import criteria as crit
from . import outputs
from .config import build_config, dump_config, load_pairs, read_pairs
from .errors import ConfigurationError, EPLabError, FitError, MissingArtifactError
from .eulerian import initial_fields, run
from .lagrangian import check_blowup_rate, detect_w_vanishing, reconstruct_density, run_lagrangian

log = logging.getLogger(__name__)


def criteria_report(cfg):
    """All criteria on the initial data of ``cfg``; no time stepping."""
    sc, opts = cfg.scenario, cfg.options
    g = sc.grid()
    rho0, u0 = initial_fields(sc, g)
    press = crit.check_pressureless(rho0, u0, g)
    report = {
        "H0": crit.initial_energy(rho0, u0, g, sc.K),
        "pressureless": press.as_dict(),
        "liu": crit.check_liu(rho0, u0, g),
        "energy_bound": crit.energy_upper_bound(rho0, u0, g, sc.K),
    }
    if sc.K > 0:
        report["isothermal"] = crit.isothermal_report(
            rho0, u0, g, sc.K, opts.T0, opts.eps, opts.delta0
        ).as_dict()
    return report


def lagrangian_cross_check(cfg, result):
    """Particle run on the same data, compared with stored Eulerian states."""
    sc = cfg.scenario
    g = sc.grid()
    stride = sc.output_stride
    lr = run_lagrangian(sc, n_particles=cfg.options.particles, keep_every=stride)
    resolved = lr.resolved()
    t_resolved = float(np.asarray(lr.times)[resolved][-1])
    states = result.metadata.get("states", [])
    max_rho = max_u = 0.0
    compared_to = 0.0
    for ens in lr.states:
        k = int(round(ens.time / sc.dt))
        if ens.time > t_resolved + 1e-12 or k >= len(states):
            break
        est = states[k]
        rho = reconstruct_density(ens, g)
        order = np.argsort(g.wrap(ens.x))
        u_grid = np.interp(g.nodes, g.wrap(ens.x)[order], ens.u[order], period=g.length)
        max_rho = max(max_rho, float(np.max(np.abs(rho - est.rho))))
        max_u = max(max_u, float(np.max(np.abs(u_grid - est.u))))
        compared_to = ens.time
    out = {
        "termination": lr.termination,
        "t_final": lr.ensemble.time,
        "resolved_until": t_resolved,
        "compared_until": compared_to,
        "max_rho_difference": max_rho,
        "max_u_difference": max_u,
        "max_rho_w_residual": float(np.max(np.asarray(lr.rho_w_residual)[resolved])),
        "max_wdot_residual": float(np.max(np.asarray(lr.wdot_residual)[resolved])),
    }
    t, W, Wd = lr.history()
    try:
        est = detect_w_vanishing(t, W, Wd)
        j = est["particle"]
        rate = check_blowup_rate(t, Wd[:, j] / W[:, j], est["T_star"],
                                 est["wdot_at_Tstar_sign"], sc.dt)
        out["w_vanishing"] = est
        out["rate_products"] = rate["products"]
        out["rate_bracket"] = rate["bracket"]
        out["rate_pass"] = rate["pass"]
    except FitError as exc:
        out["w_vanishing"] = None
        out["w_vanishing_note"] = str(exc)
    return out


def summarize(cfg, result):
    st = result.state
    s = result.series
    flags = {}
    for rec in result.records:
        for name, ok in rec.flags.items():
            flags[name] = flags.get(name, True) and bool(ok)
    H_final = result.records[-1].H
    drift = (H_final - result.H0) / result.H0 if result.H0 else float("nan")
    return {
        "config": cfg.as_dict(),
        "termination": result.termination,
        "message": result.message,
        "steps": result.steps,
        "t_final": st.time,
        "blowup_estimate": result.blowup_estimate,
        "energy": {"H0": result.H0, "H_final": H_final, "relative_drift": drift},
        "flags": flags,
        "last_valid_step": {
            "max_abs_rho_minus_1": float(np.max(np.abs(st.rho - 1.0))),
            "max_abs_u": float(np.max(np.abs(st.u))),
            "max_abs_rhox": s["max_abs_rhox"][-1],
            "max_abs_ux": s["max_abs_ux"][-1],
        },
        "truncation": {"tail_rho": result.metadata["tail_rho"], "tail_u": result.metadata["tail_u"]},
        "solver": {"mean_picard_iterations": result.metadata["mean_picard_iterations"],
                   "max_picard_iterations": result.metadata["max_picard_iterations"]},
    }


def run_experiment(cfg, out_dir=None):
    """Eulerian run (plus the particle cross-check when enabled and K = 0) with artifacts.

    Returns the summary document; artifacts go to ``out_dir`` (or the config's
    ``outputs.dir``) when one is given.
    """
    sc, opts = cfg.scenario, cfg.options
    cross = opts.lagrangian and sc.K == 0
    result = run(sc, keep_states=cross)
    summary = summarize(cfg, result)
    summary["criteria"] = criteria_report(cfg)
    if cross:
        summary["lagrangian"] = lagrangian_cross_check(cfg, result)
    out_dir = out_dir or opts.out_dir
    if out_dir:
        out = Path(out_dir)
        g = sc.grid()
        outputs.write_diagnostics(out / outputs.DIAGNOSTICS_FILE, result.records)
        outputs.write_series(out / outputs.SERIES_FILE, result.series)
        outputs.write_snapshots(out / outputs.SNAPSHOT_FILE, result.snapshots, g.nodes)
        outputs.write_json(out / outputs.SUMMARY_FILE, summary)
        (out / outputs.CONFIG_FILE).write_text(dump_config(cfg), encoding="utf-8")
    return summary


# ---- sweeps -------------------------------------------------------------

SWEEP_PREFIX = "sweep."
SWEEP_COLUMNS = ("cell", "termination", "T_star", "rate_constant", "H0", "pressureless_holds",
                 "liu_holds", "error")


def parse_sweep(text, source="<sweep>"):
    """Base pairs and ordered axes from a sweep file.

    Axis lines look like ``sweep.init.a = 0.3, 0.7``; every other line is a
    base config entry.  Cells enumerate the Cartesian product in file order.
    """
    pairs = read_pairs(text, source)
    base = {k: v for k, v in pairs.items() if not k.startswith(SWEEP_PREFIX)}
    axes = []
    for k, v in pairs.items():
        if k.startswith(SWEEP_PREFIX):
            values = [s.strip() for s in v.split(",") if s.strip()]
            if not values:
                raise ConfigurationError(f"{k}: empty axis")
            axes.append((k[len(SWEEP_PREFIX):], values))
    build_config(base)
    for key, values in axes:
        for v in values:
            build_config({**base, key: v})
    return base, axes


def sweep_cells(base, axes):
    names = [k for k, _ in axes]
    return [(i, dict(zip(names, combo)))
            for i, combo in enumerate(itertools.product(*(v for _, v in axes)))]


def run_cell(base, index, assignment):
    """One sweep row; failures are recorded in the row, never raised."""
    row = {"cell": index, **assignment}
    try:
        cfg = build_config({**base, **assignment})
        res = run(cfg.scenario)
        rep = criteria_report(cfg)
        est = res.blowup_estimate or {}
        row.update(termination=res.termination, T_star=est.get("T_star", float("nan")),
                   rate_constant=est.get("rate_constant", float("nan")), H0=rep["H0"],
                   pressureless_holds=rep["pressureless"]["holds"], liu_holds=rep["liu"]["holds"],
                   error="")
    except (EPLabError, ValueError, ArithmeticError) as exc:
        row.update(termination="error", T_star=float("nan"), rate_constant=float("nan"),
                   H0=float("nan"), pressureless_holds="", liu_holds="", error=str(exc))
    return row


def _cell_job(args):
    return run_cell(*args)


def run_sweep(base, axes, parallel=1, order=None):
    """Rows for every cell, sorted by cell index whatever the execution order.

    ``order`` optionally permutes the submission order (used to check that the
    output does not depend on scheduling).
    """
    cells = sweep_cells(base, axes)
    if order is not None:
        cells = [cells[i] for i in order]
    jobs = [(base, i, a) for i, a in cells]
    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_cell_job, jobs))
    else:
        rows = [_cell_job(j) for j in jobs]
    return sorted(rows, key=lambda r: r["cell"])


def _cell_text(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return outputs.fmt(value)
    return str(value)


def write_sweep(path, rows, axes):
    names = [k for k, _ in axes]
    header = ["cell", *names, *SWEEP_COLUMNS[1:]]
    body = ([_cell_text(r.get(c, "")) for c in header] for r in rows)
    return outputs.write_rows(path, header, body)


def sweep_from_file(path, parallel=1, out_dir=None):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read sweep file {path}: {exc}") from exc
    base, axes = parse_sweep(text, str(path))
    rows = run_sweep(base, axes, parallel)
    if out_dir:
        write_sweep(Path(out_dir) / "sweep.csv", rows, axes)
    return rows, axes


# ---- plot data ----------------------------------------------------------

PLOT_KINDS = ("fig2", "fig4", "waterfall")  # fig4 is the snapshot waterfall


def _require_dir(run_dir):
    run_dir = Path(run_dir)
    if not (run_dir / outputs.SUMMARY_FILE).is_file():
        raise MissingArtifactError(f"{run_dir} has no {outputs.SUMMARY_FILE}; run it first")
    return run_dir


def fig2_data(run_dir):
    """(t, rho(0,t), -u_x(0,t)) up to the last sample below the blow-up threshold."""
    run_dir = _require_dir(run_dir)
    summary = outputs.read_json(run_dir / outputs.SUMMARY_FILE)
    s = outputs.read_csv(run_dir / outputs.SERIES_FILE)
    threshold = float(summary["config"]["solver.blowup_threshold"])
    ok = np.maximum(s["max_abs_ux"], s["max_abs_rhox"]) <= threshold
    end = len(ok) if ok.all() else int(np.argmin(ok))
    return {"t": s["t"][:end], "rho_origin": s["rho_origin"][:end],
            "minus_ux_origin": s["minus_ux_origin"][:end]}


def waterfall_data(run_dirs):
    rows = []
    for i, d in enumerate(run_dirs):
        d = _require_dir(d)
        K = outputs.read_json(d / outputs.SUMMARY_FILE)["config"]["model.k"]
        snap = outputs.read_csv(d / outputs.SNAPSHOT_FILE)
        for t, x, r, u in zip(snap["t"], snap["x"], snap["rho"], snap["u"]):
            rows.append((i, K, t, x, r, u))
    return rows


def _svg_polylines(series, width=640, height=360, pad=30):
    """Minimal SVG with one polyline per (x, y) pair, scaled to a common box."""
    xs = np.concatenate([np.asarray(x) for x, _ in series])
    ys = np.concatenate([np.asarray(y) for _, y in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    sx = (width - 2 * pad) / ((x1 - x0) or 1.0)
    sy = (height - 2 * pad) / ((y1 - y0) or 1.0)
    colours = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#17becf")
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    for k, (x, y) in enumerate(series):
        pts = " ".join(f"{pad + (a - x0) * sx:.2f},{height - pad - (b - y0) * sy:.2f}"
                       for a, b in zip(x, y))
        lines.append(f'<polyline fill="none" stroke="{colours[k % len(colours)]}" points="{pts}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def plotdata(run_dirs, kind, out_dir, svg=False):
    """Write plot-ready CSV (and optionally SVG) for ``kind``; returns the written paths."""
    if kind not in PLOT_KINDS:
        raise ConfigurationError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
    if not run_dirs:
        raise MissingArtifactError("no run directories given")
    out = Path(out_dir)
    written = []
    if kind == "fig2":
        d = fig2_data(run_dirs[0])
        rows = ([outputs.fmt(a), outputs.fmt(b), outputs.fmt(c)]
                for a, b, c in zip(d["t"], d["rho_origin"], d["minus_ux_origin"]))
        written.append(outputs.write_rows(out / "fig2.csv", ("t", "rho_origin", "minus_ux_origin"),
                                           rows))
        if svg:
            p = out / "fig2.svg"
            p.write_text(_svg_polylines([(d["t"], d["rho_origin"]), (d["t"], d["minus_ux_origin"])]),
                         encoding="utf-8")
            written.append(p)
    else:
        rows = waterfall_data(run_dirs)
        body = ([str(i), outputs.fmt(K), outputs.fmt(t), outputs.fmt(x), outputs.fmt(r), outputs.fmt(u)]
                for i, K, t, x, r, u in rows)
        written.append(outputs.write_rows(out / "waterfall.csv", ("run", "K", "t", "x", "rho", "u"),
                                           body))
        if svg:
            curves = {}
            for i, K, t, x, r, u in rows:
                curves.setdefault((i, t), ([], []))
                curves[(i, t)][0].append(x)
                curves[(i, t)][1].append(r)
            stacked, seen = [], {}
            for (i, t), (x, r) in curves.items():
                # offset successive snapshots of one run upward so the curves stack
                level = seen.get(i, 0)
                seen[i] = level + 1
                stacked.append((x, np.asarray(r) + 0.5 * level))
            p = out / "waterfall.svg"
            p.write_text(_svg_polylines(stacked), encoding="utf-8")
            written.append(p)
    return written


def load_run_config(path=None, preset=None, extra=None):
    if path is None and preset is None:
        raise ConfigurationError("give --config or --preset")
    return build_config(load_pairs(path, preset, extra=extra))
