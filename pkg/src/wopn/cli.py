"""Command-line entry point: ``wopn <subcommand> [--config cfg.json] [overrides] --out DIR``.

Exit status is 0 only when every requested item succeeded.  Otherwise a JSON
error summary goes to stderr (and ``errors.json`` in the output directory).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import WopnError
from .experiments import (
    ExperimentConfig,
    run_cycle_analysis,
    run_pipeline,
    run_simulate,
    run_stability,
    run_state_detection,
    run_t_sweep,
    write_json,
    write_manifest,
    write_rows,
)


def _csv_list(cast):
    def parse(text):
        return [cast(v) for v in text.split(",") if v.strip()]

    return parse


def _normalized(text):
    t = text.lower()
    if t in ("both", "true", "false"):
        return "both" if t == "both" else t == "true"
    raise argparse.ArgumentTypeError("expected true, false or both")


def _seeds(text):
    """``0,1,2`` or a range ``0:100``."""
    if ":" in text:
        a, b = text.split(":")
        return list(range(int(a), int(b)))
    return _csv_list(int)(text)


def build_parser():
    p = argparse.ArgumentParser(prog="wopn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "simulate": "simulate registry systems and write signal CSVs",
        "pipeline": "signal -> network -> distances -> persistence diagrams",
        "detect": "periodic/chaotic separation accuracy per distance method",
        "stability": "normalized bottleneck distance under additive noise",
        "cycle": "max D1 lifetime on cycle graphs (DD and SUPD)",
        "tsweep": "DD diagrams as the walk length t varies",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", type=Path, help="JSON config file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--systems", type=_csv_list(str))
        sp.add_argument("--labels", type=_csv_list(str))
        sp.add_argument("--workers", type=int)
        if name in ("pipeline", "detect", "stability", "tsweep"):
            sp.add_argument("-n", "--dimension", dest="n", type=int)
            sp.add_argument("--tau", type=int)
        if name in ("pipeline", "detect", "stability"):
            sp.add_argument("--methods", type=_csv_list(str))
            sp.add_argument("--t-multiplier", dest="t_multiplier", type=float)
        if name in ("pipeline", "detect"):
            sp.add_argument("--normalized", type=_normalized)
        if name == "detect":
            sp.add_argument("--seeds", type=_seeds)
        if name == "stability":
            sp.add_argument("--snr", dest="snr_db", type=_csv_list(str))
            sp.add_argument("--noise-seed", dest="noise_seed", type=int)
        if name == "tsweep":
            sp.add_argument("--ratios", type=_csv_list(float))
        if name == "cycle":
            sp.add_argument("--n-min", dest="n_min", type=int)
            sp.add_argument("--n-max", dest="n_max", type=int)
    return p


OVERRIDES = ("systems", "labels", "workers", "n", "tau", "methods", "t_multiplier", "normalized",
             "seeds", "snr_db", "noise_seed", "ratios", "n_min", "n_max", "out")


def load_config(args):
    base = {}
    if args.config is not None:
        with open(args.config) as fh:
            base = json.load(fh)
    for key in OVERRIDES:
        v = getattr(args, key, None)
        if v is not None:
            base[key] = v
    return ExperimentConfig.from_dict(base)


def run(args):
    cfg = load_config(args)
    out = Path(cfg.out)
    cmd = args.command
    errors, outputs = [], []
    if cmd == "simulate":
        outputs, errors = run_simulate(cfg)
    elif cmd == "pipeline":
        res = run_pipeline(cfg)
        outputs, errors = res.outputs, res.errors
    elif cmd == "detect":
        rows, res = run_state_detection(cfg)
        outputs, errors = res.outputs, res.errors
        for r in rows:
            tag = "normalized" if r["normalized"] else "standard"
            print(f"{r['method']:5s} {tag:10s} {100 * r['mean']:6.1f} +/- {100 * r['std']:.1f}")
    elif cmd == "stability":
        rows, errors = run_stability(cfg)
        outputs = [out / "stability.csv"]
    elif cmd == "cycle":
        run_cycle_analysis(cfg.n_min, cfg.n_max, out=out, workers=cfg.workers)
        outputs = [out / "cycle.csv"]
    elif cmd == "tsweep":
        rows, errors = run_t_sweep(cfg)
        outputs = [out / "tsweep.csv"]
    errors = [{k: v for k, v in e.items() if k != "traceback"} for e in errors]
    if errors:
        write_json(out / "errors.json", errors)
    write_manifest(cfg, cmd, [str(p) for p in outputs], errors)
    return errors


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        errors = run(args)
    except (WopnError, ValueError, KeyError, OSError) as exc:
        errors = [{"item": None, "type": type(exc).__name__, "message": str(exc)}]
    if errors:
        json.dump({"status": "failed", "errors": errors}, sys.stderr, indent=2)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
