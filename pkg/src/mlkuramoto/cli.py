"""Command-line front end: ``run``, ``sweep``, ``stability`` and ``validate``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import (AssumptionError, ConfigError, DivergenceError, NotEquilibriumError,
                     ParameterError)
from .scenario import (describe, load_config, output_stem, run_compare, run_stability,
                       run_sweep, write_json, write_run)

log = logging.getLogger("mlkuramoto")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DIVERGENCE = 2
EXIT_ASSUMPTION = 3


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    return cfg


def _out_dir(args, cfg) -> Path:
    return Path(args.out if args.out is not None else cfg.outputs.dir)


def cmd_validate(args) -> int:
    cfg = _load(args)
    print(json.dumps(describe(cfg), indent=2, default=float))
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _load(args)
    report = run_compare(cfg, keep_trajectories=cfg.outputs.phases)
    paths = write_run(report, _out_dir(args, cfg), output_stem(cfg), phases=cfg.outputs.phases)
    s = report.summary()
    log.info("final R full=%.6f reduced=%.6f, max |R_full - R_reduced|=%.3g, %.2fs",
             s["final_R_full"], s["final_R_reduced"], s["max_R_difference"], s["duration_s"])
    for p in paths:
        print(p)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    param = args.param or (cfg.sweep.param if cfg.sweep else None)
    values = args.values or (list(cfg.sweep.values) if cfg.sweep else None)
    if not param or not values:
        raise ConfigError("sweep", "give --param/--values or a sweep section in the config")
    reports = run_sweep(cfg, param, values, workers=args.workers,
                        keep_trajectories=cfg.outputs.phases)
    out = _out_dir(args, cfg)
    for v, rep in zip(values, reports):
        for p in write_run(rep, out, output_stem(cfg, param, v), phases=cfg.outputs.phases,
                           sweep=True):
            print(p)
        log.info("%s=%g: final R=%.6f", param, v, rep.R_full[-1])
    return EXIT_OK


def cmd_stability(args) -> int:
    cfg = _load(args)
    outcome = run_stability(cfg, cross_check=args.cross_check, cross_check_T=args.cross_check_T)
    out = _out_dir(args, cfg)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{cfg.name}_stability.json"
    write_json(path, outcome.to_dict())
    log.info("verdict: %s (reduced: %s)", outcome.verdict, outcome.reduced.verdict)
    if outcome.cross_check is not None:
        log.info("cross-check: %s", outcome.cross_check)
    print(path)
    print(outcome.verdict)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlkuramoto",
        description="Kuramoto oscillators on multilayer networks and their reduced systems.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario YAML/JSON file")
        p.add_argument("--out", help="output directory (default: outputs.dir)")
        p.add_argument("--seed", type=int, help="override every seed in the config")

    p = sub.add_parser("run", help="integrate full and reduced systems side by side")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="repeat `run` over perturbation amplitudes or couplings")
    common(p)
    p.add_argument("--param", choices=["amplitude", "epsilon"])
    p.add_argument("--values", type=lambda s: [float(x) for x in s.split(",")],
                   help="comma-separated values")
    p.add_argument("--workers", type=int, help="concurrent runs (default: one per CPU)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stability", help="spectrum and verdict of a broadcast equilibrium")
    common(p)
    p.add_argument("--cross-check", action="store_true",
                   help="also integrate a perturbed copy and compare with the verdict")
    p.add_argument("--cross-check-T", type=float, default=200.0)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("validate", help="parse the config and print it with defaults")
    common(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (AssumptionError, NotEquilibriumError) as exc:
        print(f"assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION


if __name__ == "__main__":
    sys.exit(main())
