"""Command line entry points: fit-gaze, experiment, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiment as experiment_mod
from . import gaze_models
from .server import serve


def _cmd_fit_gaze(args) -> int:
    obs = gaze_models.read_observations_csv(args.observations)
    report = gaze_models.build_model_report(obs, seed=args.seed, folds=args.folds)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"report written to {args.out}")
    else:
        print(text)
    return 0


def _cmd_experiment(args) -> int:
    plan = experiment_mod.ExperimentPlan.load(args.plan) if args.plan else experiment_mod.ExperimentPlan()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    log_dir = None
    if args.log_trials:
        log_dir = out / "trials"
        log_dir.mkdir(exist_ok=True)
    print(f"running {len(experiment_mod.expand_trials(plan))} trials ...")
    result = experiment_mod.run_experiment(plan, log_dir=log_dir, progress=True)
    rep = experiment_mod.export_results(out, result)
    print(f"exports written to {out}")
    for label in rep.range_labels:
        cells = ", ".join(
            f"{mode}={rep.cells[(mode, label)].mean:.3f}" for mode in rep.modes
        )
        print(f"  {label}: {cells}")
    return 0


def _cmd_serve(args) -> int:
    serve(port=args.port, host=args.host, config_path=args.config, log_dir=args.log_dir)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gazecoop")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit-gaze", help="fit the accuracy-study models from a CSV")
    fit.add_argument("observations", help="CSV with delta_phi_deg,error_deg,tracked,phase")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--folds", type=int, default=5)
    fit.add_argument("--out", help="write the JSON report here instead of stdout")
    fit.set_defaults(func=_cmd_fit_gaze)

    exp = sub.add_parser("experiment", help="run a seeded mode-comparison experiment")
    exp.add_argument("--plan", help="JSON experiment plan (defaults used when omitted)")
    exp.add_argument("--out", required=True, help="output directory")
    exp.add_argument("--log-trials", action="store_true", help="also write per-trial JSONL logs")
    exp.set_defaults(func=_cmd_experiment)

    srv = sub.add_parser("serve", help="host live game sessions over websockets")
    srv.add_argument("--port", type=int, default=8000)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--config", help="JSON session config")
    srv.add_argument("--log-dir", help="directory for session logs")
    srv.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
