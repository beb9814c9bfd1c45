"""Command-line front end.

Exit codes: 0 success, 1 no violation found under ``--expect-violation``,
2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import means, witnesses
from .errors import InputError, InvalidConfig, NumericalError
from .functionals import TraceFunctional, normalize
from .harness import SamplerConfig, run_suite
from .linalg import eig_hermitian, load_matrix, matrix_to_literal
from .witnesses import InequalityKind

LOG_LEVELS = {"quiet": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

EXIT_OK, EXIT_NOT_VIOLATED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


def _configure_logging() -> None:
    name = os.environ.get("TRACEWITNESS_LOG", "quiet").lower()
    level = LOG_LEVELS.get(name)
    if level is None:
        raise InvalidConfig(f"TRACEWITNESS_LOG must be one of {sorted(LOG_LEVELS)}, got {name!r}")
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.captureWarnings(True)


def _num(x: float) -> str:
    return repr(float(x))


def _entry(z: complex) -> str:
    if z.imag == 0:
        return _num(z.real)
    return f"{_num(z.real)}{'+' if z.imag >= 0 else '-'}{_num(abs(z.imag))}j"


def format_matrix(M: np.ndarray) -> str:
    rows = [[_entry(z) for z in row] for row in np.asarray(M, dtype=complex)]
    width = max(len(e) for row in rows for e in row)
    return "\n".join("  ".join(e.rjust(width) for e in row) for row in rows)


def _emit(args: argparse.Namespace, payload: Any, pretty: str) -> None:
    if args.json:
        print(json.dumps(payload))
    else:
        print(pretty)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


# -- subcommands ---------------------------------------------------------------


def _cmd_mean(args: argparse.Namespace) -> int:
    M = means.mean(args.kind, load_matrix(args.a), load_matrix(args.b))
    _emit(args, matrix_to_literal(M), format_matrix(M))
    return EXIT_OK


def _sgm_square_input(S: np.ndarray) -> np.ndarray:
    """Rotate a 2x2 density into its eigenbasis, larger weight first, trace one."""
    if S.shape != (2, 2):
        raise InvalidConfig("sgm-squared needs a 2x2 functional")
    w = eig_hermitian(TraceFunctional(S).density).eigenvalues
    return np.diag(w[::-1] / w.sum())


def _cmd_witness(args: argparse.Namespace) -> int:
    kind = InequalityKind(args.ineq)
    S = load_matrix(args.s)
    kw: dict[str, Any] = {}
    if kind is InequalityKind.SGM_SQUARED:
        S = _sgm_square_input(S)
    elif kind is InequalityKind.QUAD_SQUARE:
        if args.seed is None:
            raise InvalidConfig("quad-square may sample random matrices; pass --seed")
        phi = TraceFunctional(S)
        S = normalize(phi, 1.0 if args.mode == "density" else phi.dim).density
        kw = {"mode": args.mode, "seed": args.seed}
    report = witnesses.run_witness(kind, S, **kw)
    text = report.to_json() if args.json else report.to_json(indent=2)
    print(text)
    _write(args.out, report.to_json(indent=2))
    if args.expect_violation and not report.violated:
        print(f"no violation found for {kind.value} (margin {_num(report.margin)})", file=sys.stderr)
        return EXIT_NOT_VIOLATED
    return EXIT_OK


def _cmd_check(args: argparse.Namespace) -> int:
    kind = InequalityKind(args.ineq)
    A = load_matrix(args.a)
    B = load_matrix(args.b) if args.b else None
    S = load_matrix(args.s) if args.s else None
    if S is None and kind is not InequalityKind.OVERLAP_FIDELITY:
        raise InvalidConfig(f"{kind.value} needs --s")
    lhs, rhs = witnesses.evaluate(kind, S, A, B)
    margin = lhs - rhs
    violated = margin > witnesses.violation_tolerance(rhs)
    payload = {
        "kind": kind.value,
        "lhs": _num(lhs),
        "rhs": _num(rhs),
        "margin": _num(margin),
        "violated": violated,
    }
    pretty = (
        f"{kind.value}: lhs = {_num(lhs)}, rhs = {_num(rhs)}, margin = {_num(margin)}\n"
        f"{'violated' if violated else 'holds'}"
    )
    _emit(args, payload, pretty)
    return EXIT_OK


def _cmd_suite(args: argparse.Namespace) -> int:
    cfg = SamplerConfig(dim=args.dim, seed=args.seed, count=args.count)
    S = load_matrix(args.s) if args.s else None
    report = run_suite(cfg, S=S)
    text = report.to_json(indent=None if args.json else 2)
    if args.json:
        print(text)
    else:
        for c in report.checks:
            status = "ok  " if c.passed else "FAIL"
            print(f"{status} {c.name:28s} {c.failures:5d}/{c.samples:<6d} worst {c.worst_margin:+.3e}")
        print("suite " + ("passed" if report.passed else "FAILED"))
    _write(args.out, report.to_json(indent=2))
    _write(args.csv, report.to_csv())
    return EXIT_OK


def _cmd_family(args: argparse.Namespace) -> int:
    fam = witnesses.sgm_square_family(args.epsilon)
    mats = {"A": fam.A, "X": fam.X, "X_sqrt": fam.X_sqrt, "B": fam.B, "M": fam.M, "M_squared": fam.M2}
    payload = {"epsilon": fam.epsilon, **{k: matrix_to_literal(v) for k, v in mats.items()}}
    pretty = f"epsilon = {_num(fam.epsilon)}\n" + "\n".join(
        f"{k}:\n{format_matrix(v)}" for k, v in mats.items()
    )
    _emit(args, payload, pretty)
    _write(args.out, json.dumps(payload, indent=2))
    return EXIT_OK


def _cmd_fidelity(args: argparse.Namespace) -> int:
    rho, sigma = load_matrix(args.rho), load_matrix(args.sigma)
    amp = means.fidelity_amplitude(rho, sigma)
    overlap = float(np.trace(means.as_density(rho) @ means.as_density(sigma, "sigma")).real)
    payload = {"amplitude": _num(amp), "fidelity": _num(amp * amp), "overlap": _num(overlap)}
    pretty = "\n".join(f"{k} = {v}" for k, v in payload.items())
    _emit(args, payload, pretty)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="tracewitness",
        description="Matrix means and counterexamples to trace inequalities for non-tracial functionals.",
    )
    p.add_argument("--json", action="store_true", help="machine-readable output")
    # also accept --json after the subcommand without clobbering it when given before
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("mean", parents=[common], help="compute a mean of two PD matrices")
    m.add_argument("--kind", required=True, choices=[k.value for k in means.MeanKind])
    m.add_argument("--a", required=True, metavar="FILE")
    m.add_argument("--b", required=True, metavar="FILE")
    m.set_defaults(func=_cmd_mean)

    ineqs = [k.value for k in InequalityKind]
    w = sub.add_parser("witness", parents=[common], help="search for a violation of an inequality under S")
    w.add_argument("--ineq", required=True, choices=[k for k in ineqs if k != "overlap-fidelity"])
    w.add_argument("--s", required=True, metavar="FILE")
    w.add_argument("--out", metavar="FILE")
    w.add_argument("--expect-violation", action="store_true", help="exit 1 when no violation is found")
    w.add_argument("--mode", choices=witnesses.QUAD_MODES, default="density", help="quad-square normalization")
    w.add_argument("--seed", type=int, help="seed for quad-square random search")
    w.set_defaults(func=_cmd_witness)

    c = sub.add_parser("check", parents=[common], help="evaluate one inequality at given matrices")
    c.add_argument("--ineq", required=True, choices=ineqs)
    c.add_argument("--a", required=True, metavar="FILE")
    c.add_argument("--b", metavar="FILE")
    c.add_argument("--s", metavar="FILE")
    c.set_defaults(func=_cmd_check)

    s = sub.add_parser("suite", parents=[common], help="run the randomized verification suite")
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--count", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--s", metavar="FILE", help="also run every witness on this functional")
    s.add_argument("--out", metavar="FILE")
    s.add_argument("--csv", metavar="FILE")
    s.set_defaults(func=_cmd_suite)

    f = sub.add_parser("family", parents=[common], help="closed-form matrices of the squared-mean family")
    f.add_argument("--epsilon", type=float, required=True)
    f.add_argument("--out", metavar="FILE")
    f.set_defaults(func=_cmd_family)

    fi = sub.add_parser("fidelity", parents=[common], help="fidelity of two density matrices")
    fi.add_argument("--rho", required=True, metavar="FILE")
    fi.add_argument("--sigma", required=True, metavar="FILE")
    fi.set_defaults(func=_cmd_fidelity)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _configure_logging()
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
