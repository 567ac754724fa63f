"""Command line: ``eplab {run, criteria, sweep, odelab, plotdata}``.

Exit status is 0 on success, 2 for usage or configuration errors and 1 for
missing artifacts or I/O problems.  Solver failures are results, not errors:
they are recorded in the run summary.
"""

import argparse
import logging
import math
import sys
from pathlib import Path

from . import odelab, outputs
from .config import PRESETS
from .errors import ConfigurationError, EPLabError, MissingArtifactError
from .experiments import (
    PLOT_KINDS, criteria_report, load_run_config, plotdata, run_experiment, sweep_from_file,
    write_sweep,
)


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _add_config_flags(p):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named initial-data preset")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")


def _extra(pairs):
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigurationError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="eplab", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="time-step one scenario and write artifacts")
    _add_config_flags(p)
    p.add_argument("--out-dir", help="artifact directory")

    p = sub.add_parser("criteria", help="evaluate blow-up criteria on the initial data")
    _add_config_flags(p)
    p.add_argument("--out-dir", help="write criteria.json here")

    p = sub.add_parser("sweep", help="run every cell of a parameter sweep")
    p.add_argument("sweep_file", help="sweep file: base keys plus sweep.<key> = v1, v2, ... axes")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.add_argument("--out-dir", default=".", help="where sweep.csv goes")

    p = sub.add_parser("odelab", help="oscillator zero lab and the decaying-forcing counterexample")
    p.add_argument("--mode", choices=("counterexample", "equation"), default="counterexample")
    p.add_argument("--a", type=_positive, default=None, help="stiffness (> 0)")
    p.add_argument("--b", type=float, default=1.0 / 3.0)
    p.add_argument("--w0", type=float, default=1.0)
    p.add_argument("--wdot0", type=float, default=0.0)
    p.add_argument("--t-end", type=_positive, default=200.0)

    p = sub.add_parser("plotdata", help="plot-ready CSV/SVG from run directories")
    p.add_argument("runs", nargs="*", help="run directories")
    p.add_argument("--kind", choices=PLOT_KINDS, required=True)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--svg", action="store_true", help="also write a simple SVG rendering")
    return ap


def _print_doc(doc):
    sys.stdout.write(outputs.dumps(doc))


def cmd_run(args):
    cfg = load_run_config(args.config, args.preset, _extra(args.set))
    summary = run_experiment(cfg, args.out_dir)
    est = summary["blowup_estimate"]
    tstar = f" T*={est['T_star']:.4f}" if est else ""
    print(f"termination={summary['termination']} t={summary['t_final']:.4f}{tstar}")
    return 0


def cmd_criteria(args):
    cfg = load_run_config(args.config, args.preset, _extra(args.set))
    report = criteria_report(cfg)
    if args.out_dir:
        outputs.write_json(Path(args.out_dir) / "criteria.json", report)
    _print_doc(report)
    return 0


def cmd_sweep(args):
    if args.parallel < 1:
        raise ConfigurationError("--parallel must be >= 1")
    rows, axes = sweep_from_file(args.sweep_file, args.parallel, None)
    path = write_sweep(Path(args.out_dir) / "sweep.csv", rows, axes)
    print(f"{len(rows)} cells -> {path}")
    return 0


def cmd_odelab(args):
    if args.mode == "counterexample":
        a = 0.2 if args.a is None else args.a
        _print_doc(odelab.lab_report(a=a, b=args.b, t_end=args.t_end))
        return 0
    a = 1.0 if args.a is None else args.a
    p = odelab.OscillatorProblem(a, args.b, args.w0, args.wdot0)
    cf = odelab.has_zero_closed_form(p)
    tr = odelab.integrate_inequality_trajectory(p, t_end=min(args.t_end, 4.0 * p.period))
    _print_doc({"problem": {"a": p.a, "b": p.b, "w0": p.w0, "wdot0": p.wdot0},
                "hypotheses": odelab.check_lemma_hypotheses(p),
                "closed_form": cf, "numeric_first_zero": tr.first_zero,
                "first_zero_over_pi": None if tr.first_zero is None else tr.first_zero / math.pi})
    return 0


def cmd_plotdata(args):
    for path in plotdata(args.runs, args.kind, args.out_dir, args.svg):
        print(path)
    return 0


COMMANDS = {"run": cmd_run, "criteria": cmd_criteria, "sweep": cmd_sweep,
            "odelab": cmd_odelab, "plotdata": cmd_plotdata}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except MissingArtifactError as exc:
        print(f"eplab: {exc}", file=sys.stderr)
        return 1
    except ConfigurationError as exc:
        print(f"eplab: {exc}", file=sys.stderr)
        return 2
    except (EPLabError, OSError) as exc:
        print(f"eplab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
