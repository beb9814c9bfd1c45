"""Randomized verification suite.

Every check draws from its own named random stream (derived from the master
seed and the check name), evaluates one invariant per sample and records a
*defect*: a real number that is positive exactly when the invariant fails
at that sample. ``worst_margin`` is the largest defect seen.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterator

import numpy as np

from . import means, witnesses
from .errors import DegenerateGrid, ScalarFunctional
from .functionals import (
    TraceFunctional,
    apply,
    classify_traciality,
    is_scalar,
    normalize,
)
from .linalg import commutator_norm, eig_hermitian, hermitize, matrix_function, psd_tolerance
from .rng import derive_seed
from .samplers import (
    Sampler,
    SamplerConfig,
    random_density,
    random_pd,
    random_unit_vector,
    random_unitary,
)
from .witnesses import InequalityKind, violation_tolerance

log = logging.getLogger(__name__)

__all__ = [
    "SamplerConfig",
    "SuiteReport",
    "CheckResult",
    "random_pd",
    "random_unit_vector",
    "random_unitary",
    "random_density",
    "run_suite",
    "slope_estimate",
    "CHECKS",
]

# full-grid scalar searches cost ~1e3 evaluations each
SCALAR_IMMUNITY_MAX_SAMPLES = 5
# 2x2 evaluations are cheap; run the diagonal claim at a fixed large count
QUAD_DIAG_SAMPLES = 10_000


def slope_estimate(family: Callable[[float], float], grid: Any) -> float:
    """Least-squares slope of ``family(eps)`` against ``eps`` over a decreasing grid.

    Raises:
        DegenerateGrid: fewer than three points, or not strictly decreasing.
    """
    eps = np.asarray(list(grid), dtype=float)
    if eps.size < 3:
        raise DegenerateGrid(f"need at least 3 grid points, got {eps.size}")
    if not np.all(np.diff(eps) < 0) or not np.all(eps > 0):
        raise DegenerateGrid("grid must be positive and strictly decreasing")
    values = np.array([family(e) for e in eps], dtype=float)
    slope, _ = np.polyfit(eps, values, 1)
    return float(slope)


@dataclass
class CheckResult:
    name: str
    module: str
    invariant: str
    samples: int
    failures: int
    worst_margin: float
    worst_index: int
    stream_seed: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class SuiteReport:
    seed: int
    dim: int
    count: int
    checks: list[CheckResult]
    injected: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "dim": self.dim,
            "count": self.count,
            "passed": self.passed,
            "checks": [dict(asdict(c), passed=c.passed) for c in self.checks],
            "injected": self.injected,
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "samples", "failures", "worst_margin"])
        for c in self.checks:
            w.writerow([c.name, c.samples, c.failures, repr(c.worst_margin)])
        return buf.getvalue()


@dataclass
class _Ctx:
    cfg: SamplerConfig
    sampler: Sampler
    phi: TraceFunctional | None = None
    reports: list[witnesses.WitnessReport] = field(default_factory=list)


CheckFn = Callable[[_Ctx], Iterator[float]]


@dataclass(frozen=True)
class _Check:
    name: str
    module: str
    invariant: str
    fn: CheckFn
    max_samples: int | None = None
    fixed_samples: int | None = None


CHECKS: list[_Check] = []


def _check(
    name: str,
    module: str,
    invariant: str,
    max_samples: int | None = None,
    fixed_samples: int | None = None,
):
    def deco(fn: CheckFn) -> CheckFn:
        CHECKS.append(_Check(name, module, invariant, fn, max_samples, fixed_samples))
        return fn

    return deco


def _fro(M: np.ndarray) -> float:
    return float(np.linalg.norm(M))


def _tr(M: np.ndarray) -> float:
    return float(np.trace(M).real)


def _pairs(ctx: _Ctx) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    while True:
        yield ctx.sampler.pd(), ctx.sampler.pd()


# -- linalg -------------------------------------------------------------------


@_check("sqrt_square_roundtrip", "linalg", "sqrt(H)^2 = H for PSD H, within 1e-8 (1 + |H|_F)")
def _(ctx):
    n = ctx.cfg.dim
    while True:
        G = ctx.sampler.gaussian((n, max(n - 1, 1)))
        H = hermitize(G @ G.conj().T)  # singular when n > 1
        R = matrix_function(H, "sqrt")
        yield _fro(R @ R - H) - 1e-8 * (1 + _fro(H))


@_check("sqrt_inv_sqrt_identity", "linalg", "sqrt(H) inv_sqrt(H) = I for PD H, cond-scaled tolerance")
def _(ctx):
    n = ctx.cfg.dim
    while True:
        H = ctx.sampler.pd()
        w = eig_hermitian(H).eigenvalues
        P = matrix_function(H, "sqrt") @ matrix_function(H, "inv_sqrt")
        yield _fro(P - np.eye(n)) - 1e-8 * math.sqrt(w[-1] / w[0])


@_check("eig_sorted_trace", "linalg", "eigenvalues ascending, real, summing to the trace")
def _(ctx):
    while True:
        H = ctx.sampler.hermitian()
        w = eig_hermitian(H).eigenvalues
        tr = _tr(H)
        unsorted = 1.0 if np.any(np.diff(w) < 0) else -1.0
        yield max(unsorted, abs(w.sum() - tr) - 1e-10 * (1 + abs(tr)))


@_check("hermitize_idempotent", "linalg", "hermitize(hermitize(M)) == hermitize(M)")
def _(ctx):
    while True:
        M = ctx.sampler.hermitian() + 1e-12 * ctx.sampler.gaussian((ctx.cfg.dim, ctx.cfg.dim))
        H = hermitize(M)
        d = _fro(hermitize(H) - H)
        yield d if d > 0 else -1.0


@_check("eig_unitary_invariance", "linalg", "spectrum of U* H U equals spectrum of H within 1e-9")
def _(ctx):
    while True:
        H = ctx.sampler.hermitian()
        U = ctx.sampler.unitary()
        w1 = eig_hermitian(H).eigenvalues
        w2 = eig_hermitian(hermitize(U.conj().T @ H @ U)).eigenvalues
        yield float(np.max(np.abs(w1 - w2))) - 1e-9


# -- means --------------------------------------------------------------------


@_check("eigenvalue_identity", "means", "lambda_j(A ♮ B) = sqrt(lambda_j(AB)), 1e-8 relative")
def _(ctx):
    for A, B in _pairs(ctx):
        yield _eigenvalue_identity_defect(A, B)


def _eigenvalue_identity_defect(A: np.ndarray, B: np.ndarray) -> float:
    M = means.spectral_geomean(A, B)
    lam = eig_hermitian(M).eigenvalues
    # AB is similar to a PD matrix, so its spectrum is real and positive
    mu = np.clip(np.sort(np.linalg.eigvals(A @ B).real), 0, None)
    root = np.sqrt(mu)
    return float(np.max(np.abs(lam - root) - 1e-8 * root))


@_check("trace_cs_bound", "means", "Tr(A ♮ B) <= sqrt(Tr A Tr B) + 1e-9")
def _(ctx):
    for A, B in _pairs(ctx):
        yield _tr(means.spectral_geomean(A, B)) - math.sqrt(_tr(A) * _tr(B)) - 1e-9


@_check("squared_trace_identity", "means", "Tr((A ♮ B)^2) = Tr(AB), 1e-8 relative")
def _(ctx):
    for A, B in _pairs(ctx):
        M = means.spectral_geomean(A, B)
        ab = float(np.trace(A @ B).real)
        yield abs(_tr(M @ M) - ab) - 1e-8 * abs(ab)


@_check("squared_trace_bound", "means", "Tr((A ♮ B)^2) <= sqrt(Tr A^2 Tr B^2) + 1e-9")
def _(ctx):
    for A, B in _pairs(ctx):
        M = means.spectral_geomean(A, B)
        yield _tr(M @ M) - math.sqrt(_tr(A @ A) * _tr(B @ B)) - 1e-9


@_check("commuting_means_agree", "means", "AB = BA implies A # B = A ♮ B within 1e-8 relative")
def _(ctx):
    while True:
        A, B = ctx.sampler.commuting_pd_pair()
        if commutator_norm(A, B) > 1e-12:
            yield -1.0  # premise not met at this sample
            continue
        G = means.metric_geomean(A, B)
        yield _fro(G - means.spectral_geomean(A, B)) - 1e-8 * (1 + _fro(G))


@_check("noncommuting_means_differ", "means", "|AB - BA| > 1e-3 implies |A # B - A ♮ B| > 1e-10")
def _(ctx):
    for A, B in _pairs(ctx):
        if commutator_norm(A, B) <= 1e-3:
            yield -1.0
            continue
        yield 1e-10 - _fro(means.metric_geomean(A, B) - means.spectral_geomean(A, B))


@_check("unitary_congruence", "means", "U*(A ♮ B)U = (U*AU) ♮ (U*BU) within 1e-8 relative")
def _(ctx):
    for A, B in _pairs(ctx):
        U = ctx.sampler.unitary()
        Uh = U.conj().T
        M = means.spectral_geomean(A, B)
        N = means.spectral_geomean(hermitize(Uh @ A @ U), hermitize(Uh @ B @ U))
        yield _fro(Uh @ M @ U - N) - 1e-8 * (1 + _fro(M))


@_check("loewner_agm", "means", "(A + B)/2 - A # B is positive semidefinite")
def _(ctx):
    for A, B in _pairs(ctx):
        D = hermitize(means.arithmetic_mean(A, B) - means.metric_geomean(A, B))
        w = eig_hermitian(D).eigenvalues
        yield -w[0] - psd_tolerance(w)


@_check("trace_agm_sgm", "means", "Tr(A ♮ B) <= Tr((A + B)/2) + 1e-9")
def _(ctx):
    for A, B in _pairs(ctx):
        yield _tr(means.spectral_geomean(A, B)) - _tr(means.arithmetic_mean(A, B)) - 1e-9


@_check("bures_trace_identity", "means", "Tr(A ♮ B) = Tr((A^{1/2} B A^{1/2})^{1/2}), 1e-8 relative")
def _(ctx):
    for A, B in _pairs(ctx):
        t1 = _tr(means.spectral_geomean(A, B))
        t2 = _tr(means.bures_cross(A, B))
        yield abs(t1 - t2) - 1e-8 * (1 + abs(t1))


@_check("riccati_residual", "means", "X = A^{-1} # B satisfies |XAX - B|_F <= 1e-7 (1 + |B|_F)")
def _(ctx):
    for A, B in _pairs(ctx):
        X = means.riccati_solution(A, B)
        yield _fro(X @ A @ X - B) - 1e-7 * (1 + _fro(B))


@_check("metric_mean_symmetry", "means", "A # B = B # A within 1e-8 relative")
def _(ctx):
    for A, B in _pairs(ctx):
        G = means.metric_geomean(A, B)
        yield _fro(G - means.metric_geomean(B, A)) - 1e-8 * (1 + _fro(G))


@_check("overlap_fidelity", "means", "Tr(rho sigma) <= F(rho, sigma) + 1e-9")
def _(ctx):
    while True:
        rho, sigma = ctx.sampler.density(), ctx.sampler.density()
        yield _tr(rho @ sigma) - means.fidelity(rho, sigma) - 1e-9


@_check("fidelity_range_symmetry", "means", "0 <= amplitude <= 1 + 1e-10 and F symmetric within 1e-9")
def _(ctx):
    while True:
        rho, sigma = ctx.sampler.density(), ctx.sampler.density()
        f = means.fidelity_amplitude(rho, sigma)
        g = means.fidelity_amplitude(sigma, rho)
        yield max(f - 1 - 1e-10, -f, abs(f * f - g * g) - 1e-9)


# -- functionals ----------------------------------------------------------------


@_check(
    "traciality_equivalence",
    "functionals",
    "S scalar iff commutator defect and rank-one spread are below 10 tol (tol = 1e-9)",
)
def _(ctx):
    k = 0
    while True:
        if k % 10 == 0:
            S = ctx.sampler.uniform(0.1, 5.0) * np.eye(ctx.cfg.dim)
        else:
            S = ctx.sampler.pd()
        k += 1
        v = classify_traciality(TraceFunctional(S), tol=1e-9, sample_count=100, seed=ctx.cfg.seed + k)
        diag = v.commutator_defect < 1e-8 and v.rank_one_spread < 1e-8
        yield 1.0 if diag != v.is_scalar else -1.0


@_check("kadison", "functionals", "phi(A)^2 <= phi(A^2) + 1e-9 for states phi, Hermitian A")
def _(ctx):
    while True:
        phi = TraceFunctional(ctx.sampler.density())
        A = ctx.sampler.hermitian()
        yield apply(phi, A) ** 2 - apply(phi, A @ A) - 1e-9


@_check("positivity", "functionals", "phi(X) >= 0 for PSD S and PSD X")
def _(ctx):
    while True:
        phi = TraceFunctional(ctx.sampler.pd())
        X = ctx.sampler.pd()
        yield -apply(phi, X) - 1e-10 * (1 + _fro(phi.density) * _fro(X))


@_check("unitary_invariance_trace", "functionals", "S = cI gives phi(U* A U) = phi(A) within 1e-10 scale")
def _(ctx):
    while True:
        phi = TraceFunctional(ctx.sampler.uniform(0.1, 5.0) * np.eye(ctx.cfg.dim))
        A = ctx.sampler.hermitian()
        U = ctx.sampler.unitary()
        d = abs(apply(phi, hermitize(U.conj().T @ A @ U)) - apply(phi, A))
        yield d - 1e-10 * (1 + _fro(phi.density) * _fro(A))


# -- witnesses -----------------------------------------------------------------

_COMPLETE = {
    "bures": witnesses.bures_witness,
    "sgm_cs": witnesses.sgm_cs_witness,
    "amean": witnesses.amean_witness,
}


def _completeness(which: str) -> CheckFn:
    def fn(ctx: _Ctx) -> Iterator[float]:
        while True:
            rep = _COMPLETE[which](ctx.sampler.pd())
            ctx.reports.append(rep)
            yield violation_tolerance(rep.rhs) - rep.margin

    return fn


for _name in _COMPLETE:
    _check(
        f"completeness_{_name}",
        "witnesses",
        f"{_name}_witness returns violated=true for random non-scalar PD S",
    )(_completeness(_name))


@_check("witness_soundness", "witnesses", "violated reports stay violated when replayed from stored A, B, S")
def _(ctx):
    # consumes reports collected by the completeness checks
    for rep in ctx.reports:
        if not rep.violated:
            yield -1.0
            continue
        _, rhs, margin = witnesses.replay(rep)
        yield violation_tolerance(rhs) - margin
    while True:
        yield -1.0


@_check(
    "scalar_immunity",
    "witnesses",
    "S = cI: no witness search finds a violation over its full grid",
    max_samples=SCALAR_IMMUNITY_MAX_SAMPLES,
)
def _(ctx):
    while True:
        S = ctx.sampler.uniform(0.1, 5.0) * np.eye(ctx.cfg.dim)
        worst = -math.inf
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ScalarFunctional)
            for fn in _COMPLETE.values():
                rep = fn(S)
                worst = max(worst, rep.margin - violation_tolerance(rep.rhs))
        yield worst


@_check(
    "expansion_fidelity",
    "witnesses",
    "|eval_F - expansion_F| / delta^3 varies by < 10x over delta in {1e-1, 1e-2, 1e-3}",
)
def _(ctx):
    while True:
        s = ctx.sampler.uniform(1.2, 5.0)
        S = np.diag([s, 1.0])
        ratios = [
            abs(witnesses.eval_F(witnesses.THETA, d, S) - witnesses.expansion_F(witnesses.THETA, d, s)) / d**3
            for d in (1e-1, 1e-2, 1e-3)
        ]
        yield max(ratios) / min(ratios) - 10.0


@_check("mu_optimality", "witnesses", "mu alpha beta - (gamma + mu^2 alpha beta)/2 peaks at mu = 1")
def _(ctx):
    grid = np.linspace(0.01, 3.0, 300)
    step = grid[1] - grid[0]
    while True:
        S = ctx.sampler.pd()
        u, v = ctx.sampler.unit_vector(), ctx.sampler.unit_vector()
        gamma = float(np.real(u.conj() @ S @ u))
        beta = float(np.real(v.conj() @ S @ v))
        alpha = abs(np.vdot(u, v)) ** 2
        vals = [witnesses.amean_limit_margin(m, alpha, beta, gamma) for m in grid]
        yield abs(grid[int(np.argmax(vals))] - 1.0) - step


@_check(
    "quad_square_diag_holds",
    "witnesses",
    "S = diag(s, 1), s in {1, 2, 10}: Tr(S Y^2) <= (Tr S Y)^2 for random PD Y in P_2",
    fixed_samples=QUAD_DIAG_SAMPLES,
)
def _(ctx):
    k = 0
    while True:
        s = (1.0, 2.0, 10.0)[k % 3]
        k += 1
        S = np.diag([s, 1.0])
        Y = ctx.sampler.pd(2)
        lhs, rhs = witnesses.evaluate(InequalityKind.QUAD_SQUARE, S, Y)
        yield lhs - rhs - 1e-9 * (1 + abs(rhs))


@_check("squared_family_slope", "witnesses", "slope of lhs^2 - rhs^2 on the explicit family is s/2 within 10%")
def _(ctx):
    while True:
        s = ctx.sampler.uniform(0.05, 0.5)
        rep = witnesses.sgm_square_witness(np.diag([0.5 + s, 0.5 - s]))
        yield abs(rep.extras["slope"] - s / 2) - 0.1 * s / 2


# -- driver --------------------------------------------------------------------


def _run_check(chk: _Check, cfg: SamplerConfig, ctx_reports: list) -> CheckResult:
    stream_seed = derive_seed(cfg.seed, chk.name)
    sampler = Sampler(cfg, chk.name)
    ctx = _Ctx(cfg, sampler, reports=ctx_reports)
    if chk.fixed_samples is not None:
        n = chk.fixed_samples
    elif chk.max_samples is not None:
        n = min(cfg.count, chk.max_samples)
    else:
        n = cfg.count
    failures, worst, worst_i = 0, -math.inf, -1
    it = chk.fn(ctx)
    for i in range(n):
        d = float(next(it))
        if d > 0:
            failures += 1
        if d > worst:
            worst, worst_i = d, i
    sampler.log_acceptance(chk.name)
    log.debug("%s: %d/%d failures, worst %.3e", chk.name, failures, n, worst)
    return CheckResult(chk.name, chk.module, chk.invariant, n, failures, worst, worst_i, stream_seed)


def _injected_summary(S: np.ndarray) -> dict[str, Any]:
    """Run every witness construction on one user-supplied functional.

    A witness is expected to be violated exactly when ``S`` is not a multiple
    of the identity.
    """
    phi = TraceFunctional(S)
    scalar = is_scalar(phi)
    n = phi.dim
    results: dict[str, Any] = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ScalarFunctional)
        runs: dict[str, Callable[[], witnesses.WitnessReport]] = {
            "bures-am": lambda: witnesses.bures_witness(phi),
            "sgm-cs": lambda: witnesses.sgm_cs_witness(phi),
            "sgm-arithmetic": lambda: witnesses.amean_witness(phi),
            "quad-square-trace-n": lambda: witnesses.quad_square_witness(normalize(phi, n), mode="trace_n"),
        }
        if n == 2:
            # the squared family lives in the eigenbasis of S, larger weight first
            w = eig_hermitian(phi.density).eigenvalues
            D = np.diag(w[::-1] / w.sum())
            runs["sgm-squared"] = lambda: witnesses.sgm_square_witness(D)
        for name, run in runs.items():
            rep = run()
            results[name] = {"violated": rep.violated, "margin": rep.margin, "expected": not scalar}
    return {"S_is_scalar": scalar, "witnesses": results}


def run_suite(cfg: SamplerConfig, S: Any = None, checks: list[str] | None = None) -> SuiteReport:
    """Run every registered check with ``cfg.count`` samples (fewer where capped).

    Args:
        cfg: sampler configuration; ``cfg.dim`` is the matrix size.
        S: optional functional density; when given, every witness is also run
            on it and the outcome is recorded under ``injected``.
        checks: restrict to these check names.
    """
    selected = CHECKS if checks is None else [c for c in CHECKS if c.name in checks]
    reports: list[witnesses.WitnessReport] = []
    results = [_run_check(c, cfg, reports) for c in selected]
    injected = None
    if S is not None:
        injected = _injected_summary(np.asarray(S, dtype=complex))
        mismatches = sum(1 for r in injected["witnesses"].values() if r["violated"] != r["expected"])
        worst = max(
            (r["margin"] if not r["expected"] else -r["margin"]) for r in injected["witnesses"].values()
        )
        results.append(
            CheckResult(
                "injected_functional",
                "witnesses",
                "witnesses on the supplied S are violated exactly when S is not scalar",
                len(injected["witnesses"]),
                mismatches,
                float(worst),
                -1,
                0,
            )
        )
    return SuiteReport(cfg.seed, cfg.dim, cfg.count, results, injected)
