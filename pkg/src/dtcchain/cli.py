"""Command line entry point: ``dtcchain run | sweep | list-presets``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .runner import (OUT_DIR_ENV, ConfigError, RunConfig, SweepConfig, apply_overrides, get_preset,
                     list_presets, parse_config, run, run_sweep)


def _load_json(path: str) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno} column {e.colno}", e.msg) from None


def _run(args) -> int:
    if bool(args.preset) == bool(args.config):
        raise ConfigError("", "give exactly one of --preset or --config")
    base = get_preset(args.preset) if args.preset else parse_config(Path(args.config).read_text())
    cfg = RunConfig.from_dict(apply_overrides(base.to_dict(), args.set or []))
    if args.dump_config:
        print(cfg.to_json())
        return 0
    res = run(cfg, args.out_dir)
    print(json.dumps(res.summary(), indent=2, sort_keys=True))
    return 0


def _sweep(args) -> int:
    d = _load_json(args.config)
    workers = args.workers or int(d.pop("workers", 1))
    d.pop("workers", None)
    cfg = SweepConfig.from_dict(d)
    path = run_sweep(cfg, args.out_dir, workers)
    print(path)
    return 0


def _list(args) -> int:
    rows = list_presets()
    width = max(len(n) for n, _ in rows)
    for name, desc in rows:
        print(f"{name:<{width}}  {desc}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dtcchain", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one configuration")
    r.add_argument("--preset", help="named preset (see list-presets)")
    r.add_argument("--config", help="JSON configuration file")
    r.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./dtc_output)")
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a field by dotted path, e.g. schedule.epsilon=0.2")
    r.add_argument("--dump-config", action="store_true", help="print the resolved config and exit")
    r.set_defaults(func=_run)

    s = sub.add_parser("sweep", help="run a parameter grid")
    s.add_argument("--config", required=True, help="JSON sweep file")
    s.add_argument("--out-dir")
    s.add_argument("--workers", type=int, default=0, help="parallel processes")
    s.set_defaults(func=_sweep)

    lp = sub.add_parser("list-presets", help="show available presets")
    lp.set_defaults(func=_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
