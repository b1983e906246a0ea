"""Command-line entry point: ``proxgeneric run | list | validate``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .experiments import ConfigError, all_passed, load_config, run_config, to_csv, to_jsonl, validate_config

SEED_ENV = "PROXGENERIC_SEED"
OUT_DIR_ENV = "PROXGENERIC_OUT_DIR"

# (type, parameters, prox availability)
CATALOG_LISTING = [
    ("zero", "dim", "closed-form (identity)"),
    ("quadratic", "Q (PSD matrix), b, c", "closed-form (linear solve)"),
    ("abs_sum", "dim, w", "closed-form (soft thresholding)"),
    ("eucl_norm", "dim, w", "closed-form (block shrinkage)"),
    ("indicator_box", "lo, hi", "closed-form (clipping)"),
    ("indicator_ball", "center, radius", "closed-form (radial projection)"),
    ("huber", "dim, delta", "closed-form (coordinatewise)"),
    ("perturbed", "base, sigma in (0,1)",
     "closed-form at lambda=1: (1-sigma) * prox of base; numeric otherwise"),
    ("shifted", "base, c", "as base"),
    ("tikhonov", "base, mu > 0", "as base (rescaled argument and parameter)"),
    ("scaled", "base, t > 0", "as base (rescaled argument and parameter)"),
]


def list_catalog(filter_text: str = "") -> str:
    rows = [r for r in CATALOG_LISTING if filter_text.lower() in r[0]]
    w0 = max(len(r[0]) for r in CATALOG_LISTING)
    w1 = max(len(r[1]) for r in CATALOG_LISTING)
    return "".join(f"{a:<{w0}}  {b:<{w1}}  {c}\n" for a, b, c in rows)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="proxgeneric", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the experiments named in a config")
    run.add_argument("config_pos", nargs="?", metavar="CONFIG")
    run.add_argument("--config", help="config file (YAML or JSON)")
    run.add_argument("--seed", type=int, help=f"master seed (env {SEED_ENV})")
    run.add_argument("--out", help=f"output file; relative paths resolve under ${OUT_DIR_ENV}")
    run.add_argument("--format", choices=["jsonl", "csv"], help="output format (default jsonl)")
    run.add_argument("--parallel", action="store_true", help="run probes concurrently")

    ls = sub.add_parser("list", help="list catalog node types")
    ls.add_argument("filter", nargs="?", default="")

    val = sub.add_parser("validate", help="schema-check a config without running it")
    val.add_argument("config_pos", nargs="?", metavar="CONFIG")
    val.add_argument("--config")
    return p


def _config_path(args):
    path = args.config or args.config_pos
    if not path:
        raise ConfigError("no config given (use --config PATH)")
    return path


def _resolve_out(out, cfg):
    out = out or (cfg.get("output") or {}).get("path")
    if out is None:
        return None
    out = Path(out)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not out.is_absolute():
        out = Path(base) / out
    return out


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "list":
        sys.stdout.write(list_catalog(args.filter))
        return 0
    try:
        cfg = load_config(_config_path(args))
        if args.command == "validate":
            funcs = validate_config(cfg)
            print(f"ok: {len(funcs)} function(s)")
            return 0
        seed = args.seed
        if seed is None and os.environ.get(SEED_ENV):
            seed = int(os.environ[SEED_ENV])
        records = run_config(cfg, seed=seed, parallel=args.parallel)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fmt = args.format or (cfg.get("output") or {}).get("format", "jsonl")
    text = to_csv(records) if fmt == "csv" else to_jsonl(records)
    out = _resolve_out(args.out, cfg)
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
    failed = [r for r in records if r.passed is False]
    for r in failed:
        print(f"FAILED {r.experiment}[{r.probe}] {r.id}", file=sys.stderr)
    return 0 if all_passed(records) else 1


if __name__ == "__main__":
    sys.exit(main())
