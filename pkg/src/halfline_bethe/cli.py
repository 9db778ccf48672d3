"""Batch command-line interface.

Subcommands compute exact probabilities/propagators, run oracle comparisons,
or execute the named validation suites, and emit JSON-lines or CSV records.
Exit codes: 0 success (and every validation check passed), 1 validation
failure, 2 usage/parameter error, 3 numerical non-convergence.

Set HALFLINE_BETHE_CACHE_DIR to enable result caching: a repeated run with an
identical spec returns the stored record (marked "cached": true) without
recomputation.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import os
import sys
import time

from . import __version__
from .bose_exact import DampedTime, propagator_fullline, propagator_halfline
from .contour_quad import QuadOptions, RadiiScheme
from .errors import ConvergenceError
from .asep_exact import (prob_fullline, prob_halfline, prob_n1_closed,
                         tuned_radii)
from .oracles import LatticeWindow, McConfig, ctmc_prob, mc_estimate
from .scattering import AsepParams, BoseParams
from .suites import (DEFAULT_SEED, run_asep_suite, run_bose_suite,
                     run_identity_suite)

CACHE_ENV = "HALFLINE_BETHE_CACHE_DIR"

VALIDATE_COMMANDS = {
    "validate-identities": run_identity_suite,
    "validate-asep": run_asep_suite,
    "validate-bose": run_bose_suite,
}

#: flat CSV column order (list-valued fields are ';'-joined)
CSV_COLUMNS = [
    "command", "p", "c", "Y", "X", "t", "tau", "tol", "max_points", "radii",
    "seed", "trials", "window", "N", "draws", "deterministic", "value",
    "value_imag", "imag_residual", "error_estimate", "points_used",
    "term_count", "oracle_value", "oracle_delta", "mc_estimate", "mc_std_error",
    "mc_delta", "checks", "all_passed", "cached", "wall_clock_s", "version",
]


def cache_key(spec: dict) -> str:
    """Digest of the canonically serialized run spec: identical specs map to
    identical keys, any field change changes the key."""
    canon = json.dumps(spec, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def export(records: list[dict], fmt: str, path: str):
    """Write records as JSON lines or flat CSV (fixed column order)."""
    if fmt == "json":
        with open(path, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    elif fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS,
                                    extrasaction="ignore")
            if records:
                writer.writeheader()
            for rec in records:
                flat = dict(rec)
                for key, val in flat.items():
                    if isinstance(val, (list, tuple)):
                        flat[key] = ";".join(str(v) for v in val)
                writer.writerow(flat)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfline-bethe",
        description="Exact half-line exclusion-process probabilities and "
                    "hard-wall Bose-gas propagators, with oracle validation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, bose=False):
        sp.add_argument("--tol", type=float, default=1e-10)
        sp.add_argument("--max-points", type=int, default=4096)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--deterministic", action="store_true",
                        help="echoed in the report; evaluation is always "
                             "single-threaded with fixed reduction order")
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--config", type=str, default=None,
                        help="JSON file with defaults for any flag (flags win)")

    def asep_core(sp):
        sp.add_argument("--p", type=float, default=None)
        sp.add_argument("--Y", type=str, default=None)
        sp.add_argument("--X", type=str, default=None)
        sp.add_argument("--t", type=float, default=None)

    sp = sub.add_parser("asep-prob", help="half-line transition probability")
    asep_core(sp)
    sp.add_argument("--radii", type=str, default=None,
                    help="comma list overriding the automatic contour radii")
    common(sp)

    sp = sub.add_parser("asep-fullline", help="full-line transition probability")
    asep_core(sp)
    sp.add_argument("--radii", type=str, default=None,
                    help="single radius overriding the default circle")
    common(sp)

    sp = sub.add_parser("asep-n1", help="single-particle closed form")
    asep_core(sp)
    sp.add_argument("--radii", type=str, default=None)
    common(sp)

    sp = sub.add_parser("bose-prop", help="hard-wall Bose-gas propagator")
    sp.add_argument("--c", type=float, default=None)
    sp.add_argument("--Y", type=str, default=None)
    sp.add_argument("--X", type=str, default=None)
    sp.add_argument("--tau", type=float, default=None,
                    help="imaginary-time shortcut: t = -i*tau")
    sp.add_argument("--t", type=str, default=None,
                    help="complex damped time, e.g. '0.3-0.5j'")
    sp.add_argument("--fullline", action="store_true")
    common(sp, bose=True)

    sp = sub.add_parser("mc-compare",
                        help="exact value vs uniformization vs Monte Carlo")
    asep_core(sp)
    sp.add_argument("--trials", type=int, default=200_000)
    sp.add_argument("--window", type=str, default=None,
                    help="lo,hi window override for the uniformization oracle")
    common(sp)

    for name in VALIDATE_COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name.split('-')[1]} suite")
        sp.add_argument("--N", type=int, default=None,
                        help="size cap for the identity suite")
        sp.add_argument("--draws", type=int, default=200)
        sp.add_argument("--p", type=float, default=0.4)
        sp.add_argument("--c", type=float, default=1.0)
        common(sp)
    return parser


def _apply_config(argv, args: argparse.Namespace,
                  parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Merge a JSON config file under the explicitly given flags.

    Re-parses into a namespace preloaded with the config values; argparse
    only fills attributes that the command line leaves untouched.
    """
    if getattr(args, "config", None) is None:
        return args
    with open(args.config) as fh:
        conf = json.load(fh)
    preset = argparse.Namespace()
    for key, val in conf.items():
        setattr(preset, key.replace("-", "_"), val)
    return parser.parse_args(argv, namespace=preset)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) is None:
            raise ValueError(f"missing required parameter --{name}")


def _spec_dict(args: argparse.Namespace) -> dict:
    skip = {"out", "format", "config"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _quad_opts(args) -> QuadOptions:
    return QuadOptions(initial_points=16, max_points=args.max_points,
                       tol=args.tol)


def _run_command(args: argparse.Namespace) -> dict:
    rec: dict = {"command": args.command}
    if args.command in ("asep-prob", "asep-fullline", "asep-n1", "mc-compare"):
        _require(args, "p", "Y", "X", "t")
        params = AsepParams.from_p(args.p)
        y = _parse_int_list(args.Y)
        x = _parse_int_list(args.X)
        rec.update(p=args.p, Y=y, X=x, t=args.t)

    if args.command == "asep-prob":
        radii = None
        if args.radii:
            radii = RadiiScheme(1.0 / (2.0 * params.q), tuple(_parse_float_list(args.radii)))
        rep = prob_halfline(y, x, args.t, params, _quad_opts(args), radii)
        rec.update(value=rep.value, imag_residual=rep.imag_residual,
                   error_estimate=rep.error_estimate,
                   points_used=rep.points_used, term_count=rep.term_count,
                   radii=list(radii.radii if radii else tuned_radii(params, len(y)).radii))
    elif args.command == "asep-fullline":
        radius = _parse_float_list(args.radii)[0] if args.radii else None
        rep = prob_fullline(y, x, args.t, params, _quad_opts(args), radius)
        rec.update(value=rep.value, imag_residual=rep.imag_residual,
                   error_estimate=rep.error_estimate,
                   points_used=rep.points_used, term_count=rep.term_count)
    elif args.command == "asep-n1":
        if len(y) != 1 or len(x) != 1:
            raise ValueError("asep-n1 needs single-site Y and X")
        radius = _parse_float_list(args.radii)[0] if args.radii else None
        rep = prob_n1_closed(y[0], x[0], args.t, params, _quad_opts(args), radius)
        rec.update(value=rep.value, imag_residual=rep.imag_residual,
                   error_estimate=rep.error_estimate,
                   points_used=rep.points_used, term_count=rep.term_count)
    elif args.command == "bose-prop":
        _require(args, "c", "Y", "X")
        params = BoseParams(args.c)
        y = _parse_float_list(args.Y)
        x = _parse_float_list(args.X)
        if (args.tau is None) == (args.t is None):
            raise ValueError("give exactly one of --tau or --t")
        t = DampedTime.imaginary(args.tau) if args.tau is not None \
            else DampedTime(complex(args.t))
        fn = propagator_fullline if args.fullline else propagator_halfline
        rep = fn(y, x, t, params, None if args.max_points == 4096 and
                 args.tol == 1e-10 else _quad_opts(args))
        rec.update(c=args.c, Y=y, X=x, tau=args.tau, t=str(t.t),
                   value=rep.value.real, value_imag=rep.value.imag,
                   error_estimate=rep.error_estimate,
                   points_used=rep.points_used, term_count=rep.term_count)
    elif args.command == "mc-compare":
        rep = prob_halfline(y, x, args.t, params, _quad_opts(args))
        window = None
        if args.window:
            lo, hi = _parse_int_list(args.window)
            window = LatticeWindow(lo, hi)
        oracle = ctmc_prob(y, x, args.t, params, window)
        est, se = mc_estimate(y, x, McConfig(args.trials, args.seed, args.t),
                              params)
        rec.update(trials=args.trials, seed=args.seed, value=rep.value,
                   oracle_value=oracle, oracle_delta=rep.value - oracle,
                   mc_estimate=est, mc_std_error=se, mc_delta=rep.value - est,
                   all_passed=bool(abs(rep.value - est) <= 4.0 * max(se, 1e-12)))
    elif args.command in VALIDATE_COMMANDS:
        fn = VALIDATE_COMMANDS[args.command]
        if args.command == "validate-identities":
            suite = fn(n_max=args.N or 3, draws=args.draws, seed=args.seed,
                       p=args.p, c=args.c)
        elif args.command == "validate-asep":
            suite = fn(seed=args.seed, p=args.p)
        else:
            suite = fn(seed=args.seed, c=args.c)
        rec.update(
            seed=args.seed,
            checks=[c.line() for c in suite.checks],
            all_passed=suite.all_passed,
        )
        for line in rec["checks"]:
            print(line)
    else:  # pragma: no cover
        raise ValueError(f"unknown command {args.command}")
    rec.update(deterministic=bool(getattr(args, "deterministic", False)),
               tol=getattr(args, "tol", None),
               max_points=getattr(args, "max_points", None))
    return rec


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(argv, args, parser)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    spec = _spec_dict(args)
    key = cache_key(spec)
    cache_dir = os.environ.get(CACHE_ENV)
    cache_path = os.path.join(cache_dir, key + ".json") if cache_dir else None

    try:
        if cache_path and os.path.exists(cache_path):
            with open(cache_path) as fh:
                rec = json.load(fh)
            rec["cached"] = True
        else:
            start = time.perf_counter()
            rec = _run_command(args)
            rec["wall_clock_s"] = time.perf_counter() - start
            rec["version"] = __version__
            rec["cached"] = False
            rec["spec_key"] = key
            if cache_path:
                os.makedirs(cache_dir, exist_ok=True)
                with open(cache_path, "w") as fh:
                    json.dump(rec, fh, sort_keys=True)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(json.dumps(rec, sort_keys=True))
    if args.out:
        export([rec], args.format, args.out)
    if args.command in VALIDATE_COMMANDS or args.command == "mc-compare":
        return 0 if rec.get("all_passed", True) else 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
