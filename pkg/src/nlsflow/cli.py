"""``nlsflow`` command line: one subcommand per experiment."""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from nlsflow.experiments import EXPERIMENTS, ConfigError, ExperimentConfig, emit_outputs, load_config, run

# flags with dedicated spellings; every other config field gets --<name>
_SPECIAL = {"seed", "out_dir", "n_samples", "experiment"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlsflow", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat TOML file of key = value pairs")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", dest="out_dir")
        p.add_argument("--n-samples", dest="n_samples", type=int)
        for f in dataclasses.fields(ExperimentConfig):
            if f.name in _SPECIAL:
                continue
            flag = "--" + f.name.replace("_", "-")
            default = getattr(ExperimentConfig(), f.name)
            if isinstance(default, list):
                p.add_argument(flag, dest=f.name, type=float, nargs="+")
            elif isinstance(default, bool):
                p.add_argument(flag, dest=f.name, type=lambda s: s.lower() in ("1", "true", "yes"))
            else:
                p.add_argument(flag, dest=f.name, type=type(default))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    try:
        config = load_config(args.config, **overrides)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    result = run(config)
    paths = emit_outputs(result)
    print(json.dumps({"experiment": result.name, "ok": result.ok, "summary": str(paths["summary"])}))
    if config.experiment == "validate" and not result.ok:
        for row in result.rows:
            if not row[3]:
                print(f"FAIL {row[0]}: measured {row[1]:.3e} > threshold {row[2]:.3e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
