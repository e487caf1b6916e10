"""Command line entry point.

    homocount <experiment> --config path.json [--out dir] [--shards k --shard i] [--budget N] [--seed S]
    homocount merge --out dir part1 part2 ...
    homocount diff a.json b.json

Exit status: 0 all verdicts pass, 1 some verdict fails (or diff nonempty),
2 configuration error, 3 resource budget exceeded, 4 cache error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from . import __version__, enumeration, modular
from .cache import CacheError, cache_load, cache_store
from .config import EXPERIMENTS, ConfigError, config_hash, load_config, resolve_group
from .enumeration import enumerate_sl2, merge_results
from .experiments import RUNNERS, shard_T
from .geometry import GroupVariety, SpecialLinear
from .modular import ResourceError
from .numeric import DomainError
from .report import ReportMismatch, build_body, report_diff, write_report

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE, EXIT_CACHE = 0, 1, 2, 3, 4
SL2_VARIETY = GroupVariety(SpecialLinear(2))
_SHARD_RE = re.compile(r"\.shard-(\d+)-of-(\d+)\.jsonl$")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="homocount", description="Integral points on homogeneous varieties.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None, help="report directory (default: config 'out' or '.')")
        p.add_argument("--shards", type=int, default=None)
        p.add_argument("--shard", type=int, default=None)
        p.add_argument("--budget", type=int, default=None, help="candidate budget for exhaustive searches")
        p.add_argument("--seed", type=int, default=None)
    m = sub.add_parser("merge", help="merge enumeration shard files into one cache file")
    m.add_argument("--out", required=True)
    m.add_argument("parts", nargs="+")
    d = sub.add_parser("diff", help="compare two JSON reports")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--rtol", type=float, default=1e-9)
    return ap


def _resolved(args, config: dict) -> dict:
    config = dict(config)
    if args.budget is not None:
        config["budget"] = args.budget
    if args.seed is not None:
        config["seed"] = args.seed
    config.setdefault("seed", 0)
    return config


def _run_shard(args, config: dict, out: Path) -> int:
    if args.shard is None or not 0 <= args.shard < args.shards:
        raise ConfigError("config error at --shard: need 0 <= shard < shards")
    if resolve_group(config) != SpecialLinear(2):
        raise ConfigError("config error at group: sharding is implemented for SL_2 enumeration")
    res = enumerate_sl2(shard_T(config), args.shards, args.shard)
    path = out / f"{config['experiment']}-{config_hash(config)}.shard-{args.shard}-of-{args.shards}.jsonl"
    cache_store(res, path)
    print(path)
    return EXIT_OK


def run_experiment(args) -> int:
    started = datetime.now(timezone.utc)
    config = load_config(args.config)
    if config["experiment"] != args.command:
        raise ConfigError(f"config error at experiment: config says {config['experiment']!r}, "
                          f"command is {args.command!r}")
    config = _resolved(args, config)
    if "budget" in config:
        enumeration.EXHAUSTIVE_BUDGET = config["budget"]
        modular.RESIDUE_BUDGET = config["budget"]
    out = Path(args.out or config.get("out", "."))
    if args.shards is not None:
        return _run_shard(args, config, out)
    outcome = RUNNERS[args.command](config)
    body = build_body(args.command, config, config_hash(config), __version__, outcome)
    jpath, cpath = write_report(out, body, started)
    for v in outcome.verdicts:
        print(f"{'PASS' if v['passed'] else 'FAIL'}  {v['name']}: {v['value']} (threshold {v['threshold']})")
    print(jpath)
    print(cpath)
    return EXIT_OK if body["all_passed"] else EXIT_FAIL


def run_merge(args) -> int:
    parts, seen = [], {}
    for p in args.parts:
        m = _SHARD_RE.search(p)
        if m:
            seen[int(m.group(1))] = int(m.group(2))
        parts.append(cache_load(p, SL2_VARIETY))
    ks = set(seen.values())
    complete = len(ks) == 1 and sorted(seen) == list(range(ks.pop())) and len(seen) == len(parts)
    merged = merge_results(parts, complete=complete)
    path = cache_store(merged, Path(args.out))
    print(path)
    if not complete:
        print("warning: shard set incomplete; merged file flagged incomplete", file=sys.stderr)
    return EXIT_OK


def run_diff(args) -> int:
    diffs = report_diff(args.a, args.b, rtol=args.rtol)
    print(json.dumps(diffs, indent=1, default=str))
    return EXIT_OK if not diffs else EXIT_FAIL


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "merge":
            return run_merge(args)
        if args.command == "diff":
            return run_diff(args)
        return run_experiment(args)
    except (ConfigError, ReportMismatch, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except CacheError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE


if __name__ == "__main__":
    sys.exit(main())
