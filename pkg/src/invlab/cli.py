"""Command line: ``invlab catalog | run | verify | report``.

Exit codes: 0 when every verdict matches its expectation, 1 on a mismatch,
2 on configuration or runtime errors.  Flags default to ``INVLAB_<FLAG>``
environment variables when set (e.g. ``INVLAB_JOBS=4``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .catalog import catalog_list
from .harness import (
    FORMATS,
    ConfigError,
    ReportRecord,
    catalog_config,
    dumps_json,
    emit_report,
    load_config,
    load_report,
    render,
    run_many,
)

ENV_PREFIX = "INVLAB_"
EXIT_OK, EXIT_MISMATCH, EXIT_ERROR = 0, 1, 2


def _env(name, default=None, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(ENV_PREFIX + name.upper(), f"cannot parse {raw!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="invlab", description="Fourier and Laplace inversion experiments.")
    p.add_argument("--version", action="version", version=f"invlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_default=None):
        sp.add_argument("--out", default=_env("out", out_default), help="output file or directory")
        sp.add_argument("--format", choices=FORMATS, default=_env("format", "json"))
        sp.add_argument("--seed", type=int, default=_env("seed", 0, int), help="seed for random-pair checks")
        sp.add_argument("--jobs", type=int, default=_env("jobs", 1, int), help="experiments run concurrently")

    sp = sub.add_parser("catalog", help="list catalog entries")
    sp.add_argument("filter", nargs="?", default="", help="substring of the entry id")
    sp.add_argument("--format", choices=("text", "json"), default=_env("catalog_format", "text"))

    sp = sub.add_parser("run", help="run experiments from a config file or the catalog defaults")
    sp.add_argument("--config", action="append", default=[], help="TOML experiment file (repeatable)")
    sp.add_argument("--id", dest="entry_ids", action="append", default=[], help="catalog id (repeatable)")
    sp.add_argument("--experiment", default=None, help="experiment name within the catalog entry")
    sp.add_argument("--all", action="store_true", help="every experiment of every catalog entry")
    common(sp, "reports")

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--only", default=_env("only", ""), help="comma-separated criterion numbers")
    common(sp)

    sp = sub.add_parser("report", help="re-emit stored JSON records")
    sp.add_argument("records", nargs="+", help="JSON report files")
    common(sp)
    return p


def _collect_configs(args):
    configs = [load_config(path) for path in args.config]
    for eid in args.entry_ids:
        configs.append(catalog_config(eid, args.experiment, seed=args.seed))
    if args.all:
        for entry in catalog_list():
            for name in entry.experiments:
                configs.append(catalog_config(entry.id, name, seed=args.seed))
    if not configs:
        raise ConfigError("config", "give --config, --id or --all")
    return configs


def _target(out, cfg, fmt, many):
    if cfg.output and not many:
        return Path(cfg.output)
    base = Path(out or "reports")
    if many or base.suffix == "":
        return base / f"{cfg.function_id}__{cfg.name}.{fmt}"
    return base


def cmd_catalog(args):
    entries = catalog_list(args.filter)
    if args.format == "json":
        sys.stdout.write(dumps_json([e.summary() for e in entries]))
    else:
        for e in entries:
            verdicts = ", ".join(f"{k}={v}" for k, v in sorted(e.expected_verdicts.items())) or "-"
            print(f"{e.id:20s} {e.expected_class:13s} {verdicts}")
    return EXIT_OK


def cmd_run(args):
    configs = _collect_configs(args)
    records = run_many(configs, jobs=args.jobs)
    status = EXIT_OK
    for cfg, rec in zip(configs, records):
        fmt = args.format if not cfg.output else cfg.format
        path = emit_report(rec, _target(args.out, cfg, fmt, len(configs) > 1), fmt)
        flag = "ok" if rec.matches_expectation else "MISMATCH"
        print(f"{cfg.function_id}/{cfg.name}: verdict={rec.verdict} expected={rec.expected} [{flag}] -> {path}")
        if not rec.matches_expectation:
            status = EXIT_MISMATCH
    return status


def cmd_verify(args):
    from .verification import CRITERIA, run_criterion

    numbers = sorted(CRITERIA)
    if args.only:
        numbers = [int(s) for s in args.only.split(",") if s.strip()]
        unknown = [k for k in numbers if k not in CRITERIA]
        if unknown:
            raise ConfigError("only", f"unknown criteria {unknown}")
    results = []
    for k in numbers:
        res = run_criterion(k, seed=args.seed)
        print(res.line(), flush=True)
        results.append(res)
    if args.out:
        payload = {
            "schema_version": 1,
            "version": __version__,
            "seed": args.seed,
            "criteria": [r.to_dict() for r in results],
        }
        path = Path(args.out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps_json(payload), encoding="utf-8")
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_report(args):
    status = EXIT_OK
    for src in args.records:
        rec = load_report(src)
        if args.out:
            out = Path(args.out)
            target = out / (Path(src).stem + f".{args.format}") if len(args.records) > 1 or out.suffix == "" else out
            emit_report(rec, target, args.format)
        else:
            sys.stdout.write(render(rec, args.format))
        if not rec.matches_expectation:
            status = EXIT_MISMATCH
    return status


COMMANDS = {"catalog": cmd_catalog, "run": cmd_run, "verify": cmd_verify, "report": cmd_report}


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"invlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"invlab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
