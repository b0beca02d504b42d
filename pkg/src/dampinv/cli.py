"""
Command line interface.

    dampinv validate
    dampinv simulate  --out RUN [flags]
    dampinv kernel    --out RUN [flags]
    dampinv decompose --out RUN [flags]
    dampinv invert    --out RUN [flags]
    dampinv pipeline  --out RUN [flags]

Exit codes: 0 success, 2 configuration error, 3 a validate tolerance was
violated, 4 I/O error. Failures print a one-line JSON error record on stderr
(and to RUN/error.json when the directory is writable).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .io import MatrixFormatError, read_json, write_json
from .pipeline import ConfigError, Run, RunConfig, run_pipeline
from .validate import run_checks

EXIT_OK, EXIT_CONFIG, EXIT_TOLERANCE, EXIT_IO = 0, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _run_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("model")
    g.add_argument("--model", choices=("weak", "strong"))
    g.add_argument("--gamma", type=float, help="weak damping coefficient")
    g.add_argument("--delta", type=float, help="strong damping coefficient")
    g = p.add_argument_group("discretisation")
    g.add_argument("--n", type=int, help="space dimension (default 3)")
    g.add_argument("--lmax", type=int, help="largest harmonic degree (default 0)")
    g.add_argument("--alpha", type=float, help="kernel exponent (default 1.5 strong, 0.75 weak)")
    g.add_argument("--rmax", type=float, help="radial truncation R (default 12)")
    g.add_argument("--tmax", type=float, help="time truncation T (default: adaptive)")
    g.add_argument("--panels", type=int, help="radial Gauss-Legendre panels (default 16)")
    g.add_argument("--order", type=int, help="nodes per panel (default 16)")
    g = p.add_argument_group("inversion")
    g.add_argument("--reg", choices=("tsvd", "tikhonov"))
    g.add_argument("--reg-param", type=float, help="relative threshold tau or Tikhonov mu (default 1e-8)")
    g = p.add_argument_group("phantom and noise")
    g.add_argument("--phantom", choices=("gauss", "bump", "expr"))
    g.add_argument("--amplitude", type=float)
    g.add_argument("--width", type=float)
    g.add_argument("--center", type=float)
    g.add_argument("--expr", help="numpy expression in rho and l for --phantom expr")
    g.add_argument("--seed", type=int)
    g.add_argument("--noise-sigma", type=float, help="standard deviation of additive Gaussian noise")
    g.add_argument("--noise-relative", action="store_true", default=None,
                   help="scale --noise-sigma by max|u_lk| per mode")
    g = p.add_argument_group("run")
    g.add_argument("--workers", type=int, help="threads for per-mode work")
    g.add_argument("--out", type=Path, required=True, help="run directory")
    g.add_argument("--config", type=Path, help="JSON file with the same keys; its values override flags")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="dampinv", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("validate", help="run the closed-form identity suite")
    common = _run_options()
    for name, text in (
        ("simulate", "phantom -> boundary data per mode"),
        ("kernel", "assemble Gram matrices"),
        ("decompose", "eigendecompose Gram matrices"),
        ("invert", "reconstruct coefficients from saved mode data"),
        ("pipeline", "all stages"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    for f in dataclasses.fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    if getattr(args, "config", None) is not None:
        try:
            data = read_json(args.config)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{args.config}: expected a JSON object")
        values.update({k.replace("-", "_"): v for k, v in data.items()})
    return RunConfig.from_mapping(values).check()


def _cmd_validate(args) -> int:
    checks = run_checks()
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} identities passed")
    return EXIT_OK if failed == 0 else EXIT_TOLERANCE


def _summary(run: Run, reports=None):
    out = {"out": str(run.out), "modes": len(run.modes), "alpha_in_window": run.manifest.alpha_in_window}
    if reports:
        out["max_rel_l2_error"] = max(r.rel_l2_error for r in reports)
    print(json.dumps(out, sort_keys=True))


def _cmd_run(args) -> int:
    config = config_from_args(args)
    if args.command == "pipeline":
        reports, manifest = run_pipeline(config, args.out)
        for r in reports:
            m = r.mode
            print(f"mode l={m.l} k={m.k}: rel_l2_error={r.rel_l2_error:.4e} spectrum_used={r.spectrum_used}")
        print(json.dumps({"out": str(args.out), "max_rel_l2_error": max(r.rel_l2_error for r in reports)}))
        return EXIT_OK
    run = Run(config, args.out)
    run.out.mkdir(parents=True, exist_ok=True)
    reports = None
    degrees = sorted({m.l for m in run.modes})
    if args.command == "simulate":
        run.simulate()
    elif args.command == "kernel":
        for l in degrees:
            run.gram(l)
    elif args.command == "decompose":
        for l in degrees:
            run.decomposition(l)
    elif args.command == "invert":
        reports = run.invert(run.load_series())
    run.write_manifest()
    _summary(run, reports)
    return EXIT_OK


def _fail(code: int, exc: BaseException, out=None) -> int:
    record = {"status": "error", "code": code, "type": type(exc).__name__, "error": str(exc)}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            write_json(Path(out) / "error.json", record)
        except OSError:
            pass
    return code


def _out_from_argv(argv):
    # best effort when argument parsing itself failed
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path)
    return p.parse_known_args(argv)[0].out


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
        if args.command == "validate":
            return _cmd_validate(args)
        return _cmd_run(args)
    except ConfigError as exc:
        out = getattr(args, "out", None) if args is not None else _out_from_argv(argv)
        return _fail(EXIT_CONFIG, exc, out)
    except (OSError, MatrixFormatError) as exc:
        return _fail(EXIT_IO, exc, None)


if __name__ == "__main__":
    sys.exit(main())
