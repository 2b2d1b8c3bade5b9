"""Command-line entry point: ``pathmeter run|preset|list-presets``."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, PathMeterError
from .runner import (
    list_presets,
    preset_config,
    resolve_out_dir,
    run,
    write_report,
)

EXIT_OK, EXIT_CONFIG, EXIT_COMPUTE = 0, 2, 3


def _print_summary(report, out_dir, stream):
    print(f"# {report.config.get('name')} -> {out_dir}", file=stream)
    for name, s in report.scalars.items():
        v = s.value
        if isinstance(v, complex):
            v = f"{v.real:.10g}{v.imag:+.10g}i"
        elif isinstance(v, float):
            v = f"{v:.10g}"
        print(f"{name:32s} {v}  [{s.units}]", file=stream)
    for note in report.notes:
        print(f"note: {note}", file=stream)


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", "config") from exc
    if not text.strip():
        raise ConfigError("config file is empty", "config")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", "config") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pathmeter",
        description="Weak and strong von Neumann measurements of Feynman-path functionals.",
    )
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment from a JSON config")
    r.add_argument("config")
    r.add_argument("--out", help="output directory")
    pr = sub.add_parser("preset", help="run a named preset")
    pr.add_argument("name")
    pr.add_argument("--out", help="output directory")
    pr.add_argument("--seed", type=int, help="seed for stochastic presets")
    sub.add_parser("list-presets", help="list the named presets")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name, desc in list_presets():
            print(f"{name:22s} {desc}")
        return EXIT_OK
    try:
        if args.command == "run":
            config = _load_config(args.config)
        else:
            config = preset_config(args.name, args.seed)
        report = run(config)
        out_dir = resolve_out_dir(args.out, report.config)
        write_report(report, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PathMeterError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    _print_summary(report, out_dir, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
