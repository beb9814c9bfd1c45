"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with its measured values,
visible under plain ``pytest`` as well as ``python tests/test_acceptance.py``.
"""

import json
import math
import warnings
from pathlib import Path

import numpy as np
import pytest

from tracewitness.cli import main
from tracewitness.errors import ScalarFunctional
from tracewitness.functionals import TraceFunctional, classify_traciality
from tracewitness.harness import slope_estimate
from tracewitness.linalg import Definiteness, classify_definiteness, dump_matrix
from tracewitness.means import arithmetic_mean, fidelity, sgm_from_riccati, spectral_geomean
from tracewitness.samplers import Sampler, SamplerConfig
from tracewitness.witnesses import (
    amean_witness,
    beta_zDinvz,
    bures_witness,
    eval_F,
    expansion_F,
    quad_square_witness,
    sgm_cs_witness,
    sgm_square_family,
    sgm_square_margin_family,
)

ROOT = Path(__file__).resolve().parents[1]
SEED = 20240601

FAMILY_RTOL = 1e-9
EIG_RTOL = 1e-8
TRACE_SLACK = 1e-9
SLOPE_RTOL = 0.10
BETA_TOL = 1e-12
CUBIC_SPREAD = 10.0
FIDELITY_SLACK = 1e-9
PURE_TOL = 1e-10
DEFECT_TOL = 1e-8
KADISON_SLACK = 1e-9
THREE_WITNESSES = (bures_witness, sgm_cs_witness, amean_witness)


def report(request, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'}  {request.node.name}: {detail}"
    capman = request.config.pluginmanager.getplugin("capturemanager")
    if capman is None:
        print(line)
    else:
        with capman.global_and_fixture_disabled():
            print("\n" + line)
    assert ok, detail


def sampler(name, dim):
    return Sampler(SamplerConfig(dim=dim, seed=SEED), f"{name}:{dim}")


def rel_fro(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def printed_family(e):
    """The six matrices of the explicit family, typed entry by entry."""
    A = np.array([[1, 1], [1, 1 + e]]) / 2
    X = np.array([[2 + 2 * e + e**2, 2 + e], [2 + e, 2]]) / 4
    Xh = np.array([[1 + e, 1], [1, 1]]) / 2
    b = 16 + 20 * e + 9 * e**2 + e**3
    B = np.array([[16 + 28 * e + 21 * e**2 + 7 * e**3 + e**4, b], [b, 16 + 12 * e + e**2]]) / 32
    M = np.array([[4 + 5 * e + e**2, 4 + 3 * e], [4 + 3 * e, 4 + e]]) / 8
    m = 32 + 48 * e + 22 * e**2 + 3 * e**3
    M2 = np.array([[32 + 64 * e + 42 * e**2 + 10 * e**3 + e**4, m], [m, 32 + 32 * e + 10 * e**2]]) / 64
    return {"A": A, "X": X, "X_sqrt": Xh, "B": B, "M": M, "M2": M2}


def test_01_closed_form_family(request):
    worst = 0.0
    for e in (0.1, 0.01):
        fam = sgm_square_family(e)
        ref = printed_family(e)
        derived = {
            "X": fam.X_sqrt @ fam.X_sqrt,
            "B": fam.X @ fam.A @ fam.X,
            "M": sgm_from_riccati(fam.A, fam.X).real,
            "M2": fam.M @ fam.M,
        }
        for k, v in ref.items():
            worst = max(worst, rel_fro(getattr(fam, k), v))
        for k, v in derived.items():
            worst = max(worst, rel_fro(v, ref[k]))
    report(request, worst <= FAMILY_RTOL, f"worst relative Frobenius error {worst:.2e} (tol {FAMILY_RTOL:g})")


def _pairs(name, dims=range(2, 9), count=200):
    for n in dims:
        s = sampler(name, n)
        for _ in range(count):
            yield s.pd(), s.pd()


def test_02_eigenvalue_identity(request):
    worst = 0.0
    for A, B in _pairs("eig"):
        lam = np.linalg.eigvalsh(spectral_geomean(A, B))
        root = np.sqrt(np.sort(np.linalg.eigvals(A @ B).real))
        worst = max(worst, float(np.max(np.abs(lam - root) / root)))
    report(request, worst <= EIG_RTOL, f"worst elementwise relative error {worst:.2e} over 1400 pairs")


def test_03_trace_bounds(request):
    fails = 0
    worst = -math.inf
    for A, B in _pairs("eig"):
        M = spectral_geomean(A, B)
        tr = lambda X: float(np.trace(X).real)  # noqa: E731
        ab = tr(A @ B)
        defects = [
            tr(M) - math.sqrt(tr(A) * tr(B)),
            abs(tr(M @ M) - ab) - TRACE_SLACK * abs(ab),
            ab - math.sqrt(tr(A @ A) * tr(B @ B)),
            tr(M) - tr(arithmetic_mean(A, B)),
        ]
        d = max(defects)
        worst = max(worst, d)
        fails += d > TRACE_SLACK
    report(request, fails == 0, f"{fails} failures, worst defect {worst:.2e} (slack {TRACE_SLACK:g})")


def test_04_witness_completeness(request):
    missed = []
    for n in (2, 3, 4):
        s = sampler("complete", n)
        for i in range(17 if n < 4 else 16):
            S = s.pd()
            for fn in THREE_WITNESSES:
                if not fn(S).violated:
                    missed.append((n, i, fn.__name__))
    false_alarms = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScalarFunctional)
        for n, c in ((2, 1.0), (3, 0.25), (4, 7.0)):
            for fn in THREE_WITNESSES:
                if fn(c * np.eye(n)).violated:
                    false_alarms.append((n, c, fn.__name__))
    ok = not missed and not false_alarms
    report(request, ok, f"50 non-scalar S: {len(missed)} misses; scalar S: {len(false_alarms)} violations")


def test_05_asymptotic_slope(request):
    S = np.diag([0.75, 0.25])

    def gap(e):
        lhs, rhs = sgm_square_margin_family(S, e)
        return lhs * lhs - rhs * rhs

    slope = slope_estimate(gap, (1e-2, 1e-3, 1e-4))
    ok = abs(slope - 0.125) <= SLOPE_RTOL * 0.125
    report(request, ok, f"slope {slope:.6f}, expected 0.125 within {SLOPE_RTOL:.0%}")


def test_06_rank_one_update_closed_form(request):
    a, b, phi = 2.0, 1.0, math.pi / 4
    direct, closed = beta_zDinvz(a, b, phi)
    z = np.array([math.cos(phi), math.sin(phi)])
    D = np.diag([a, b])
    M = D - (z @ D @ z) * np.outer(z, z)
    c = classify_definiteness(M)
    ok = abs(direct - 1.125) <= BETA_TOL and abs(closed - 1.125) <= BETA_TOL and c.tag is Definiteness.INDEFINITE
    report(request, ok, f"beta z*D^-1 z = {direct!r} (closed form {closed!r}); min eig of M = {c.min_eigenvalue:.4f}")


def test_07_expansion_remainder(request):
    theta = math.pi / 4
    ratios = []
    for s in (1.5, 2.0, 4.0):
        S = np.diag([s, 1.0])
        for d in (1e-1, 1e-2, 1e-3):
            ratios.append(abs(eval_F(theta, d, S) - expansion_F(theta, d, s)) / d**3)
    C = max(ratios)
    spread = C / min(ratios)
    positive = eval_F(theta, 0.01, np.diag([2.0, 1.0]))
    ok = spread < CUBIC_SPREAD and positive > 0
    report(request, ok, f"fitted C = {C:.4f}, ratio spread {spread:.2f}x; eval_F(pi/4, 0.01, diag(2,1)) = {positive:.7f}")


def test_08_quadratic_square_constructions(request):
    rank_one = quad_square_witness(np.diag([1.0, 0.0]), mode="density", t=0.5)
    rank_one_ok = abs(rank_one.lhs - 1.25) <= 1e-12 and abs(rank_one.rhs - 1.0) <= 1e-12
    identity = quad_square_witness(np.eye(3), mode="trace_n", samples=500, seed=SEED)
    survivors = []
    for n in (2, 3, 4):
        s = sampler("trace_n", n)
        for _ in range(10):
            P = s.pd()
            S = P * (n / np.trace(P).real)
            if not quad_square_witness(S, mode="trace_n").violated:
                survivors.append(n)
    ok = rank_one_ok and not identity.violated and not survivors
    report(
        request, ok,
        f"rank-one (lhs, rhs) = ({rank_one.lhs:g}, {rank_one.rhs:g}); S=I worst margin {identity.margin:.3e}; "
        f"{len(survivors)}/30 trace-n S escaped",
    )


def test_09_fidelity(request):
    fails, worst = 0, -math.inf
    for n in (2, 3, 4):
        s = sampler("fidelity", n)
        for _ in range(500):
            rho, sigma = s.density(), s.density()
            d = float(np.trace(rho @ sigma).real) - fidelity(rho, sigma)
            worst = max(worst, d)
            fails += d > FIDELITY_SLACK
    pure_err = 0.0
    for n in (2, 3, 4):
        s = sampler("pure", n)
        for _ in range(100):
            u, rho = s.pure_density()
            v, sigma = s.pure_density()
            pure_err = max(pure_err, abs(fidelity(rho, sigma) - abs(np.vdot(u, v)) ** 2))
    ok = fails == 0 and pure_err <= PURE_TOL
    report(request, ok, f"overlap bound: {fails} failures (worst {worst:.3e}); pure-state error {pure_err:.2e}")


def test_10_traciality_diagnostics(request):
    s = sampler("traciality", 3)
    disagreements = 0
    for i in range(100):
        S = s.uniform(0.1, 5.0) * np.eye(3) if i % 10 == 0 else s.pd()
        v = classify_traciality(TraceFunctional(S), seed=i)
        diag = v.commutator_defect < DEFECT_TOL and v.rank_one_spread < DEFECT_TOL
        disagreements += diag != v.is_scalar
    kadison_fails = 0
    for _ in range(20):
        phi = TraceFunctional(s.density())
        for _ in range(200):
            A = s.hermitian()
            kadison_fails += phi(A) ** 2 > phi(A @ A) + KADISON_SLACK
    ok = disagreements == 0 and kadison_fails == 0
    report(request, ok, f"{disagreements}/100 verdict disagreements; {kadison_fails}/4000 Kadison failures")


def test_11_documented_discrepancy(request, tmp_path, capsys):
    for name, M in (("a", np.diag([4.0, 1.0])), ("b", np.eye(2)), ("s", np.diag([1.0, 2.0]))):
        dump_matrix(M, tmp_path / f"{name}.json")
    code = main([
        "--json", "check", "--ineq", "sgm-arithmetic",
        "--a", str(tmp_path / "a.json"), "--b", str(tmp_path / "b.json"), "--s", str(tmp_path / "s.json"),
    ])
    out = json.loads(capsys.readouterr().out)
    margin = float(out["margin"])
    readme = (ROOT / "README.md").read_text()
    documented = "diag(4,1)" in readme and "Open Question" in readme and "means" in readme
    ok = code == 0 and abs(margin + 0.5) <= 1e-12 and not out["violated"] and documented
    report(
        request, ok,
        f"lhs {out['lhs']}, rhs {out['rhs']}, margin {out['margin']}; README cross-reference present: {documented}",
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
