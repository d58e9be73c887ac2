"""Command-line entry point: ``shallowlab <experiment> [--config F] [--seed S] ...``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .lab import EXPERIMENTS, ConfigError, ExperimentConfig, parse_config, rows_to_csv, run_experiment, \
    with_overrides, write_atomic

SCHEMAS = {
    "audit": "check,value,expected,result",
    "noise-sweep": "d,p,trials,failures,kind,seed",
    "mbqc-check": "max_m,word_steps,trials,successes,seed",
    "half-rand-audit": "check,n,value,expected,result",
    "pentagram-dist": "f_index,pauli,exact,count,samples,homogeneity_p,seed",
    "solve-parityl": "n,instances,k,eps,policy,answer,correct,seed",
    "nc1-estimate": "eps,samples,reps,adversary,correct,undecided,max_freq_dev,seed",
    "tableau-fuzz": "trials,max_qubits,agree,seed",
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shallowlab", description="Run a seeded experiment and emit CSV.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", help="key = value file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help="CSV path (default: stdout)")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (repeatable)")
    ap.epilog = "CSV columns:\n" + "\n".join(f"  {k}: {v}" for k, v in SCHEMAS.items())
    ap.formatter_class = argparse.RawDescriptionHelpFormatter
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = ExperimentConfig()
        if args.config:
            with open(args.config) as fh:
                cfg = parse_config(fh.read())
        cfg = replace(cfg, experiment=args.experiment)
        cfg = with_overrides(cfg, args.set)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if args.out:
            cfg = replace(cfg, out=args.out)
        cfg.validate()
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = rows_to_csv(run_experiment(cfg, jobs=max(1, args.jobs)))
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)
    if args.experiment in ("audit", "half-rand-audit") and ",fail" in text:
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
