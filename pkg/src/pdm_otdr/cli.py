"""Command-line entry point.

Subcommands::

    pdm-otdr generate --scheme cazac --size 1
    pdm-otdr aliasing    [--config FILE] [--preset desk|full] [--set key=value ...]
    pdm-otdr tf          ...
    pdm-otdr error-curve ...

Configuration files are INI files with a single ``[experiment]`` section of
``key = value`` pairs; list values are comma-separated. ``--set`` overrides
individual keys after the file is read.

Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import configparser
import dataclasses
import logging
import sys

from . import io
from .errors import ConfigError
from .experiments import PRESETS, ExperimentConfig, run_aliasing_experiment, run_error_vs_length, run_tf_signature
from .sequences import Scheme, build_probe

EXIT_OK, EXIT_CONFIG, EXIT_IO = 0, 2, 3

_RUNNERS = {
    "aliasing": run_aliasing_experiment,
    "tf": run_tf_signature,
    "error-curve": run_error_vs_length,
}

log = logging.getLogger("pdm_otdr")


def _convert(name: str, raw: str):
    fields = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    if name not in fields:
        raise ConfigError(f"unknown config key {name!r}")
    default = getattr(PRESETS["desk"], name)
    raw = raw.strip()
    try:
        if isinstance(default, tuple):
            items = [v.strip() for v in raw.split(",") if v.strip()]
            if name == "schemes":
                return tuple(Scheme.parse(v) for v in items)
            if name == "seeds":
                return tuple(int(v) for v in items)
            return tuple(float(v) for v in items)
        if isinstance(default, bool):
            return raw.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {exc}") from None


def load_config(path=None, preset: str = "desk", overrides=()) -> ExperimentConfig:
    """Resolve preset, then config file, then ``key=value`` overrides."""
    values = {}
    if path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not parser.has_section("experiment"):
            raise ConfigError(f"{path}: missing [experiment] section")
        for key, raw in parser.items("experiment"):
            values[key] = _convert(key, raw)
    for item in overrides:
        key, sep, raw = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not key=value")
        values[key.strip()] = _convert(key.strip(), raw)
    return dataclasses.replace(PRESETS[preset], **values)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdm-otdr", description="Dual-polarization phase-OTDR probing simulator.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write one probing period as CSV")
    gen.add_argument("--scheme", required=True, choices=[s.value for s in Scheme])
    gen.add_argument("--size", required=True, type=int, help="K for golay, M for cazac, period length for sweep")
    gen.add_argument("--symbol-rate", type=float, default=50e6)
    gen.add_argument("-o", "--output", help="output file (default: stdout)")

    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("-c", "--config", help="INI file with an [experiment] section")
        p.add_argument("--preset", choices=sorted(PRESETS), default="desk")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")
        p.add_argument("-o", "--out-dir", help="shortcut for --set out_dir=DIR")
    return parser


def _generate(args) -> int:
    probe = build_probe(args.scheme, args.size, args.symbol_rate)
    cfg = {"scheme": args.scheme, "size": args.size, "symbol_rate": args.symbol_rate}
    comments = [io.config_comment(cfg)]
    if args.output:
        io.write_sequence(args.output, probe, comments)
    else:
        io.write_sequence(sys.stdout, probe, comments)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "generate":
            return _generate(args)
        overrides = list(args.overrides)
        if args.out_dir:
            overrides.append(f"out_dir={args.out_dir}")
        cfg = load_config(args.config, args.preset, overrides)
        result = _RUNNERS[args.command](cfg)
        for path in result.files:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        where = f" ({exc.filename})" if getattr(exc, "filename", None) else ""
        print(f"I/O error{where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
