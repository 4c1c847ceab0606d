"""Command-line scenario runner.

Subcommands: verify, spectrum, bethe, orbit, report.  Flags mirror the
ScenarioConfig fields; a JSON config file can preload any of them, with
explicit flags taking precedence.  Exit codes: 0 pass, 1 numeric failure,
2 precondition or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigInvalid, GoldenMismatch, SixvqError
from .report import (
    ScenarioConfig,
    render_csv,
    render_figures,
    render_json,
    run_bethe,
    run_orbit,
    run_report,
    run_spectrum,
    run_verify,
)

_RUNNERS = {
    "verify": run_verify,
    "spectrum": run_spectrum,
    "bethe": run_bethe,
    "orbit": run_orbit,
    "report": run_report,
}


def _complex_flag(text: str) -> complex:
    try:
        re_s, _, im_s = text.partition(",")
        return complex(float(re_s), float(im_s or 0.0))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected re,im — got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sixvq",
                                     description="six-vertex auxiliary-matrix laboratory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file preloading any flag")
        p.add_argument("--N", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--M", type=int)
        p.add_argument("--xi", type=_complex_flag, metavar="RE,IM")
        p.add_argument("--zeta", type=_complex_flag, metavar="RE,IM")
        p.add_argument("--lambda", dest="lam", type=_complex_flag, metavar="RE,IM")
        p.add_argument("--z", type=_complex_flag, action="append", metavar="RE,IM")
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--convention", choices=["phodd", "phiev", "phab"])
        p.add_argument("--gradation", choices=["hom", "prin"])
        p.add_argument("--emit", choices=["json", "csv"])
        p.add_argument("--out", help="output path (figures share its prefix)")
        p.add_argument("--figures", action="store_true", default=None,
                       help="render figures next to the output")
        if name == "verify":
            p.add_argument("--check", default=None,
                           choices=["all", "intertwine", "ybe", "exact", "tq", "qcom", "sym"])
        if name == "report":
            p.add_argument("--case", default=None, choices=["m3", "m4"])
        if name == "orbit":
            p.add_argument("--gens", default=None,
                           help="comma list gen:t, e.g. 'e:0.1,f:-0.2' (default random)")
            p.add_argument("--steps", type=int, default=None)
    return parser


_GRADATION = {"hom": "homogeneous", "prin": "principal", None: None}


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    cfg = ScenarioConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigInvalid(f"cannot read config file: {exc}") from exc
        for key, value in raw.items():
            attr = "lam" if key == "lambda" else key
            if not hasattr(cfg, attr):
                raise ConfigInvalid(f"unknown config key {key!r}")
            if attr in ("xi", "zeta", "lam"):
                value = complex(value[0], value[1]) if isinstance(value, list) else complex(value)
            if attr == "z":
                value = [complex(v[0], v[1]) for v in value]
            if attr == "gradation" and value in _GRADATION:
                value = _GRADATION[value] or value
            setattr(cfg, attr, value)
    for attr in ("N", "k", "M", "xi", "zeta", "lam", "samples", "seed", "tol",
                 "convention", "emit", "out", "figures", "check", "case", "gens", "steps"):
        val = getattr(args, attr, None)
        if val is not None:
            setattr(cfg, attr, val)
    if getattr(args, "z", None):
        cfg.z = list(args.z)
    grad = getattr(args, "gradation", None)
    if grad is not None:
        cfg.gradation = _GRADATION[grad]
    if cfg.N < 3:
        raise ConfigInvalid("N must be at least 3")
    if cfg.M < 1:
        raise ConfigInvalid("M must be positive")
    if cfg.samples < 1:
        raise ConfigInvalid("samples must be positive")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        report = _RUNNERS[args.command](cfg)
    except GoldenMismatch as exc:
        sys.stderr.write(f"golden mismatch: {exc}\n")
        return 1
    except ConfigInvalid as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except SixvqError as exc:
        sys.stderr.write(f"error[{exc.code}]: {exc}\n")
        return 2

    text = render_json(report) if cfg.emit == "json" else render_csv(report)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        prefix = cfg.out.rsplit(".", 1)[0]
    else:
        sys.stdout.write(text)
        prefix = "sixvq"
    if cfg.figures:
        for path in render_figures(report, prefix):
            sys.stderr.write(f"figure: {path}\n")
    return 0 if report.get("pass", True) else 1


if __name__ == "__main__":
    sys.exit(main())
