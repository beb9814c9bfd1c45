"""Constructive counterexamples to trace inequalities for non-tracial functionals.

Each ``*_witness`` function takes a functional ``phi(X) = Tr(S X)`` and builds
positive definite matrices violating one inequality that every multiple of
the trace satisfies. The constructions are the nearly-parallel rank-one
families ``eps I + lam |u><u|``, with the "sufficiently small" parameters
found by halving sweeps.

For the spectral geometric mean we never solve the Riccati equation
numerically inside a witness: ``B`` is built as ``X A X`` from a known
``X``, so ``A ♮ B = X^{1/2} A X^{1/2}`` exactly. The report keeps ``X`` as a
certificate, which :func:`replay` verifies before using it.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import (
    InvalidConfig,
    InvalidFunctional,
    NormalizationError,
    ScalarFunctional,
    TraceWitnessError,
)
from .functionals import TraceFunctional, apply, is_scalar
from .linalg import (
    _sym,
    eig_hermitian,
    matrix_from_literal,
    matrix_function,
    matrix_to_literal,
    projector,
)
from .means import bures_cross, fidelity, spectral_geomean
from .samplers import Sampler, SamplerConfig

VIOLATION_RTOL = 1e-10
CERTIFICATE_RTOL = 1e-12

DELTA_START = 0.1
DELTA_HALVINGS = 40
EPS_START = 1e-2
EPS_HALVINGS = 30
THETA = math.pi / 4
PHI_ANGLE = math.pi / 4
SLOPE_GRID = (1e-2, 1e-3, 1e-4)


class InequalityKind(enum.Enum):
    BURES_AM = "bures-am"
    SGM_CAUCHY_SCHWARZ = "sgm-cs"
    SGM_SQUARED = "sgm-squared"
    SGM_ARITHMETIC = "sgm-arithmetic"
    QUAD_SQUARE = "quad-square"
    OVERLAP_FIDELITY = "overlap-fidelity"


@dataclass(frozen=True)
class RankOneParams:
    """Parameters of a regularized rank-one construction.

    Fields not used by a given construction are ``None``.
    """

    theta: float | None = None
    delta: float | None = None
    phi_angle: float | None = None
    lam: float | None = None
    mu: float | None = None
    epsilon: float | None = None

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "epsilon"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise InvalidConfig(f"{name} must be positive, got {val}")
        for name in ("theta", "delta", "phi_angle"):
            val = getattr(self, name)
            if val is not None and not math.isfinite(val):
                raise InvalidConfig(f"{name} must be finite, got {val}")

    def as_dict(self) -> dict[str, float]:
        d = {k: v for k, v in asdict(self).items() if v is not None}
        if "lam" in d:
            d["lambda"] = d.pop("lam")
        return d


def violation_tolerance(rhs: float) -> float:
    return VIOLATION_RTOL * (1.0 + abs(rhs))


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass
class WitnessReport:
    kind: InequalityKind
    params: dict[str, float]
    S: np.ndarray
    A: np.ndarray
    B: np.ndarray | None
    lhs: float
    rhs: float
    certificate: np.ndarray | None = None
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    @property
    def violated(self) -> bool:
        return self.margin > violation_tolerance(self.rhs)

    def to_dict(self) -> dict[str, Any]:
        def lit(M):
            return None if M is None else matrix_to_literal(M)

        return {
            "kind": self.kind.value,
            "params": {k: float(v) for k, v in self.params.items()},
            "S": lit(self.S),
            "A": lit(self.A),
            "B": lit(self.B),
            "certificate": lit(self.certificate),
            "lhs": _fmt(self.lhs),
            "rhs": _fmt(self.rhs),
            "margin": _fmt(self.margin),
            "violated": self.violated,
            "extras": self.extras,
        }

    def to_json(self, **kwargs: Any) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> WitnessReport:
        def mat(key):
            return None if d.get(key) is None else matrix_from_literal(d[key])

        return cls(
            kind=InequalityKind(d["kind"]),
            params=dict(d["params"]),
            S=mat("S"),
            A=mat("A"),
            B=mat("B"),
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            certificate=mat("certificate"),
            extras=dict(d.get("extras", {})),
        )

    @classmethod
    def from_json(cls, text: str) -> WitnessReport:
        return cls.from_dict(json.loads(text))


# -- evaluation and replay ---------------------------------------------------


def _sgm(A: np.ndarray, B: np.ndarray, certificate: np.ndarray | None) -> np.ndarray:
    if certificate is None:
        return spectral_geomean(A, B)
    X = certificate
    defect = np.linalg.norm(X @ A @ X - B)
    if defect > CERTIFICATE_RTOL * (1.0 + np.linalg.norm(B)):
        raise InvalidConfig(f"Riccati certificate does not satisfy X A X = B (defect {defect:.3e})")
    if eig_hermitian(X).eigenvalues[0] <= 0:
        raise InvalidConfig("Riccati certificate is not positive definite")
    return _sym(matrix_function(X, "sqrt") @ A @ matrix_function(X, "sqrt"))


def evaluate(
    kind: InequalityKind | str,
    S: Any,
    A: Any,
    B: Any = None,
    certificate: np.ndarray | None = None,
) -> tuple[float, float]:
    """Return ``(lhs, rhs)`` of inequality ``kind`` at the given matrices.

    The inequality claims ``lhs <= rhs``. For ``quad-square`` only ``A`` (the
    matrix ``Y``) is used; for ``overlap-fidelity`` ``A`` and ``B`` are the
    two density matrices and ``S`` is ignored.
    """
    kind = InequalityKind(kind)
    A = np.asarray(A, dtype=complex)
    B = None if B is None else np.asarray(B, dtype=complex)
    if kind is InequalityKind.OVERLAP_FIDELITY:
        return float(np.real(np.trace(A @ B))), fidelity(A, B)

    phi = S if isinstance(S, TraceFunctional) else TraceFunctional(np.asarray(S, dtype=complex))
    if kind is InequalityKind.QUAD_SQUARE:
        return apply(phi, _sym(A @ A)), apply(phi, A) ** 2
    if B is None:
        raise InvalidConfig(f"{kind.value} needs both A and B")
    if kind is InequalityKind.BURES_AM:
        return apply(phi, bures_cross(A, B)), 0.5 * (apply(phi, A) + apply(phi, B))

    M = _sgm(A, B, certificate)
    if kind is InequalityKind.SGM_CAUCHY_SCHWARZ:
        return apply(phi, M), math.sqrt(apply(phi, A) * apply(phi, B))
    if kind is InequalityKind.SGM_ARITHMETIC:
        # B = XAX can sit below the PD tolerance at tiny eps; average directly
        return apply(phi, M), apply(phi, 0.5 * (A + B))
    # SGM_SQUARED
    return (
        apply(phi, _sym(M @ M)),
        math.sqrt(apply(phi, _sym(A @ A)) * apply(phi, _sym(B @ B))),
    )


def replay(report: WitnessReport) -> tuple[float, float, float]:
    """Recompute ``(lhs, rhs, margin)`` from the matrices stored in ``report``."""
    lhs, rhs = evaluate(report.kind, report.S, report.A, report.B, report.certificate)
    return lhs, rhs, lhs - rhs


# -- closed-form pieces of the rank-one analysis ----------------------------


def _unit(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def _block(S: Any) -> np.ndarray:
    S = S.density if isinstance(S, TraceFunctional) else np.asarray(S, dtype=complex)
    if S.shape != (2, 2):
        raise InvalidFunctional(f"expected a 2x2 functional, got shape {S.shape}")
    return S


def eval_F(theta: float, delta: float, S: Any) -> float:
    """``2 |<u,v>| <u,Su> - <u,Su> - <v,Sv>`` for ``u = u(theta)``, ``v = u(theta + delta)``.

    Positive exactly when the Bures-type inequality fails at the rank-one pair
    ``(|u><u|, |v><v|)``.
    """
    S = _block(S)
    u, v = _unit(theta), _unit(theta + delta)
    su = float(np.real(u @ S @ u))
    sv = float(np.real(v @ S @ v))
    return 2.0 * abs(float(u @ v)) * su - su - sv


def expansion_F(theta: float, delta: float, s: float) -> float:
    """Second-order model of :func:`eval_F` for ``S = diag(s, 1)``."""
    return (s - 1.0) * math.sin(2 * theta) * delta - (1.0 + (s - 1.0) * math.sin(theta) ** 2) * delta**2


def sgm_cs_core_margin(theta: float, delta: float, s: float) -> float:
    """``cos^2(delta) f(theta + delta) - f(theta)`` with ``f(t) = 1 + (s-1) cos^2 t``."""
    f = lambda t: 1.0 + (s - 1.0) * math.cos(t) ** 2  # noqa: E731
    return math.cos(delta) ** 2 * f(theta + delta) - f(theta)


def _core_margin_block(theta: float, delta: float, S: np.ndarray) -> float:
    u, v = _unit(theta), _unit(theta + delta)
    return float(u @ v) ** 2 * float(np.real(v @ S @ v)) - float(np.real(u @ S @ u))


def amean_key_margin(u: Any, v: Any, S: Any) -> float:
    """``gamma - alpha beta`` with ``gamma = <u,Su>``, ``beta = <v,Sv>``, ``alpha = |<u,v>|^2``.

    Negative values certify failure of ``phi(A ♮ B) <= phi((A+B)/2)`` for the
    induced regularized pair at ``mu = 1``.
    """
    S = S.density if isinstance(S, TraceFunctional) else np.asarray(S, dtype=complex)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    gamma = float(np.real(u.conj() @ S @ u))
    beta = float(np.real(v.conj() @ S @ v))
    alpha = abs(np.vdot(u, v)) ** 2
    return gamma - alpha * beta


def amean_limit_margin(mu: float, alpha: float, beta: float, gamma: float) -> float:
    """Limit of ``phi(A ♮ B) - phi((A+B)/2)`` as ``eps -> 0``, divided by ``lam``."""
    return mu * alpha * beta - 0.5 * (gamma + mu**2 * alpha * beta)


def beta_zDinvz(a: float, b: float, phi_angle: float) -> tuple[float, float]:
    """``beta z* D^{-1} z`` for ``D = diag(a, b)``, ``z = (cos phi, sin phi)``.

    Returns the direct product and the closed form
    ``1 + (a-b)^2/(ab) cos^2 phi sin^2 phi`` as a pair.
    """
    c2, s2 = math.cos(phi_angle) ** 2, math.sin(phi_angle) ** 2
    beta = a * c2 + b * s2
    direct = beta * (c2 / a + s2 / b)
    closed = 1.0 + (a - b) ** 2 / (a * b) * c2 * s2
    return direct, closed


# -- shared search machinery --------------------------------------------------


def _functional(S: Any) -> TraceFunctional:
    return S if isinstance(S, TraceFunctional) else TraceFunctional(np.asarray(S, dtype=complex))


def _extreme_block(phi: TraceFunctional) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigenvectors for (lambda_max, lambda_min) and the 2x2 block ``diag(lambda_max, lambda_min)``."""
    e = eig_hermitian(phi.density)
    w, V = e.eigenvalues, e.eigenvectors
    return V[:, -1], V[:, 0], np.diag([w[-1], w[0]]).astype(complex)


def _embed(c: np.ndarray, e_hi: np.ndarray, e_lo: np.ndarray) -> np.ndarray:
    return c[0] * e_hi + c[1] * e_lo


def _halvings(start: float, count: int) -> list[float]:
    return [start / 2.0**k for k in range(count + 1)]


def _check_scalar(phi: TraceFunctional, name: str) -> bool:
    scalar = is_scalar(phi)
    if scalar:
        warnings.warn(
            f"{name}: functional is a multiple of the trace; no violation exists",
            ScalarFunctional,
            stacklevel=3,
        )
    return scalar


def _pick_delta(core: Callable[[float], float], sign: float) -> list[float]:
    """Return ``[delta]`` for the first halving step with positive core margin,
    or every grid value when none is found."""
    grid = [sign * d for d in _halvings(DELTA_START, DELTA_HALVINGS)]
    for d in grid:
        if core(d) > 0:
            return [d]
    return grid


def _sweep(
    deltas: list[float],
    build: Callable[[float, float], WitnessReport],
) -> WitnessReport:
    """For each delta, halve eps until violation; return the first violating
    report, otherwise the one with the largest margin."""
    best: WitnessReport | None = None
    for delta in deltas:
        for eps in _halvings(EPS_START, EPS_HALVINGS):
            rep = build(delta, eps)
            if rep.violated:
                return rep
            if best is None or rep.margin > best.margin:
                best = rep
    assert best is not None
    return best


def _regularized(eps: float, weight: float, P: np.ndarray) -> np.ndarray:
    return eps * np.eye(P.shape[0]) + weight * P


def _sqrt_regularized(eps: float, weight: float, P: np.ndarray) -> np.ndarray:
    # (eps I + w P)^{1/2} for a projection P
    return math.sqrt(eps) * np.eye(P.shape[0]) + (math.sqrt(eps + weight) - math.sqrt(eps)) * P


def _cross_check(A: np.ndarray, B: np.ndarray, M: np.ndarray) -> float | None:
    """Frobenius distance between the generic spectral mean and the certificate route."""
    try:
        return float(np.linalg.norm(spectral_geomean(A, B) - M))
    except TraceWitnessError:
        return None


# -- witnesses ----------------------------------------------------------------


def bures_witness(S: Any, lam: float = 1.0) -> WitnessReport:
    """Violate ``phi((A^{1/2} B A^{1/2})^{1/2}) <= (phi(A) + phi(B))/2``.

    Works in the eigen-block of ``S`` for its extreme eigenvalues with
    ``u = u(pi/4)``, ``v = u(pi/4 + delta)``; ``delta`` has the sign that makes
    the linear term of ``eval_F`` positive and is halved from 0.1 until
    ``eval_F > 0``. Then ``eps`` is halved from 1e-2 until
    ``A = eps I + lam |u><u|``, ``B = eps I + lam |v><v|`` violate the inequality.
    """
    phi = _functional(S)
    _check_scalar(phi, "bures_witness")
    e_hi, e_lo, blk = _extreme_block(phi)
    # d<v,Sv>/d(delta) at delta = 0 is (S22 - S11) sin 2theta in the block
    slope = float(np.real(blk[1, 1] - blk[0, 0])) * math.sin(2 * THETA)
    sign = 1.0 if slope <= 0 else -1.0
    deltas = _pick_delta(lambda d: eval_F(THETA, d, blk), sign)

    def build(delta: float, eps: float) -> WitnessReport:
        Pu = projector(_embed(_unit(THETA), e_hi, e_lo))
        Pv = projector(_embed(_unit(THETA + delta), e_hi, e_lo))
        A = _regularized(eps, lam, Pu)
        B = _regularized(eps, lam, Pv)
        lhs, rhs = evaluate(InequalityKind.BURES_AM, phi, A, B)
        return WitnessReport(
            InequalityKind.BURES_AM,
            RankOneParams(theta=THETA, delta=delta, lam=lam, epsilon=eps).as_dict(),
            phi.density, A, B, lhs, rhs,
            extras={"F": eval_F(THETA, delta, blk)},
        )

    return _sweep(deltas, build)


def _sgm_rank_one_report(
    kind: InequalityKind,
    phi: TraceFunctional,
    u: np.ndarray,
    v: np.ndarray,
    params: RankOneParams,
) -> WitnessReport:
    Pu, Pv = projector(u), projector(v)
    eps, lam, mu = params.epsilon, params.lam, params.mu
    A = _regularized(eps, lam, Pu)
    X = _regularized(eps, mu, Pv)
    B = _sym(X @ A @ X)
    Xh = _sqrt_regularized(eps, mu, Pv)
    M = _sym(Xh @ A @ Xh)
    lhs = apply(phi, M)
    if kind is InequalityKind.SGM_CAUCHY_SCHWARZ:
        rhs = math.sqrt(apply(phi, A) * apply(phi, B))
    else:
        rhs = apply(phi, 0.5 * (A + B))
    return WitnessReport(kind, params.as_dict(), phi.density, A, B, lhs, rhs, certificate=X)


def _with_cross_check(rep: WitnessReport) -> WitnessReport:
    X = rep.certificate
    Xh = matrix_function(X, "sqrt")
    rep.extras["sgm_route_difference"] = _cross_check(rep.A, rep.B, _sym(Xh @ rep.A @ Xh))
    return rep


def sgm_cs_witness(S: Any, lam: float = 1.0, mu: float = 1.0) -> WitnessReport:
    """Violate ``phi(A ♮ B) <= sqrt(phi(A) phi(B))``.

    ``A = eps I + lam |u><u|``, ``X = eps I + mu |v><v|``, ``B = X A X`` with
    ``u, v`` as in :func:`bures_witness`; the sign of ``delta`` makes
    ``f'(theta) delta > 0`` where ``f(t) = <u(t), S u(t)>``.
    """
    phi = _functional(S)
    _check_scalar(phi, "sgm_cs_witness")
    e_hi, e_lo, blk = _extreme_block(phi)
    fprime = float(np.real(blk[1, 1] - blk[0, 0])) * math.sin(2 * THETA)
    sign = 1.0 if fprime >= 0 else -1.0
    deltas = _pick_delta(lambda d: _core_margin_block(THETA, d, blk), sign)

    def build(delta: float, eps: float) -> WitnessReport:
        u = _embed(_unit(THETA), e_hi, e_lo)
        v = _embed(_unit(THETA + delta), e_hi, e_lo)
        params = RankOneParams(theta=THETA, delta=delta, lam=lam, mu=mu, epsilon=eps)
        rep = _sgm_rank_one_report(InequalityKind.SGM_CAUCHY_SCHWARZ, phi, u, v, params)
        rep.extras["core_margin"] = _core_margin_block(THETA, delta, blk)
        return rep

    return _with_cross_check(_sweep(deltas, build))


def amean_witness(S: Any, lam: float = 1.0, mu: float = 1.0) -> WitnessReport:
    """Violate ``phi(A ♮ B) <= phi((A + B)/2)``.

    In the extreme eigen-block ``D = diag(a, b)`` of ``S`` take
    ``v = z = (cos phi, sin phi)`` with ``phi = pi/4`` and ``u`` the eigenvector
    of the negative eigenvalue of ``M = D - (z* D z) z z*``; then sweep ``eps``
    down with ``B = X A X``, ``X = eps I + mu |v><v|``.
    """
    phi = _functional(S)
    _check_scalar(phi, "amean_witness")
    e_hi, e_lo, blk = _extreme_block(phi)
    a, b = float(blk[0, 0].real), float(blk[1, 1].real)
    z = _unit(PHI_ANGLE)
    beta = float(z @ blk.real @ z)
    Mkey = blk.real - beta * np.outer(z, z)
    w, V = np.linalg.eigh(Mkey)
    x = V[:, 0]
    u = _embed(x, e_hi, e_lo)
    v = _embed(z, e_hi, e_lo)
    direct, closed = beta_zDinvz(a, b, PHI_ANGLE)
    key = amean_key_margin(u, v, phi)

    def build(_: float, eps: float) -> WitnessReport:
        params = RankOneParams(phi_angle=PHI_ANGLE, lam=lam, mu=mu, epsilon=eps)
        rep = _sgm_rank_one_report(InequalityKind.SGM_ARITHMETIC, phi, u, v, params)
        rep.extras.update(
            {
                "beta_zDinvz": direct,
                "beta_zDinvz_closed_form": closed,
                "M_min_eigenvalue": float(w[0]),
                "key_margin": key,
            }
        )
        return rep

    return _with_cross_check(_sweep([0.0], build))


# -- the explicit epsilon family for the squared inequality -------------------


@dataclass(frozen=True)
class SgmSquareFamily:
    """Closed-form matrices of the explicit family, all real 2x2.

    ``X_sqrt**2 == X``, ``B == X A X``, ``M == X_sqrt A X_sqrt == A ♮ B`` and
    ``M2 == M @ M`` hold exactly in rational arithmetic.
    """

    epsilon: float
    A: np.ndarray
    X: np.ndarray
    X_sqrt: np.ndarray
    B: np.ndarray
    M: np.ndarray
    M2: np.ndarray


def sgm_square_family(epsilon: float) -> SgmSquareFamily:
    if not epsilon > 0:
        raise InvalidConfig(f"epsilon must be positive, got {epsilon}")
    e = float(epsilon)
    A = 0.5 * np.array([[1, 1], [1, 1 + e]])
    X = 0.25 * np.array([[2 + 2 * e + e**2, 2 + e], [2 + e, 2]])
    X_sqrt = 0.5 * np.array([[1 + e, 1], [1, 1]])
    b01 = 16 + 20 * e + 9 * e**2 + e**3
    B = np.array([[16 + 28 * e + 21 * e**2 + 7 * e**3 + e**4, b01], [b01, 16 + 12 * e + e**2]]) / 32
    M = np.array([[4 + 5 * e + e**2, 4 + 3 * e], [4 + 3 * e, 4 + e]]) / 8
    m01 = 32 + 48 * e + 22 * e**2 + 3 * e**3
    M2 = np.array([[32 + 64 * e + 42 * e**2 + 10 * e**3 + e**4, m01], [m01, 32 + 32 * e + 10 * e**2]]) / 64
    return SgmSquareFamily(e, A, X, X_sqrt, B, M, M2)


def normalized_gap(S: Any) -> float:
    """Return ``s`` for ``S = diag(1/2 + s, 1/2 - s)``, ``0 <= s <= 1/2``.

    Raises:
        InvalidFunctional: ``S`` is not 2x2, diagonal, trace one and ordered.
    """
    S = _block(S)
    if abs(np.trace(S).real - 1.0) > 1e-10:
        raise InvalidFunctional(f"S must have trace 1, got {np.trace(S).real!r}")
    if abs(S[0, 1]) > 1e-10 or np.max(np.abs(S.imag)) > 1e-10:
        raise InvalidFunctional("S must be real diagonal in its eigenbasis")
    s = float(S[0, 0].real) - 0.5
    if s < -1e-10 or s > 0.5 + 1e-10:
        raise InvalidFunctional(f"S must be diag(1/2 + s, 1/2 - s) with 0 <= s <= 1/2, got s = {s}")
    return max(s, 0.0)


def sgm_square_margin_family(S: Any, epsilon: float) -> tuple[float, float]:
    """``(lhs, rhs)`` of the squared inequality on the explicit family at ``epsilon``."""
    phi = _functional(S)
    fam = sgm_square_family(epsilon)
    M = _sym(fam.X_sqrt @ fam.A @ fam.X_sqrt)
    lhs = apply(phi, M @ M)
    rhs = math.sqrt(apply(phi, fam.A @ fam.A) * apply(phi, fam.B @ fam.B))
    return lhs, rhs


def sgm_square_witness(S: Any, grid: tuple[float, ...] = SLOPE_GRID) -> WitnessReport:
    """Violate ``phi((A ♮ B)^2) <= sqrt(phi(A^2) phi(B^2))`` with the explicit family.

    ``S`` must be ``diag(1/2 + s, 1/2 - s)``. The report is taken at the first
    violating grid value (or the last one); ``extras["slope"]`` is the fitted
    slope of ``lhs^2 - rhs^2`` against ``epsilon``, whose limit is ``s/2``.
    """
    from .harness import slope_estimate

    phi = _functional(S)
    s = normalized_gap(phi.density)
    if s <= 1e-10:
        warnings.warn("sgm_square_witness: S = I/2 is tracial", ScalarFunctional, stacklevel=2)

    pairs = [sgm_square_margin_family(phi, e) for e in grid]
    slope = slope_estimate(lambda e: _sq_gap(phi, e), grid) if len(grid) >= 3 else None
    chosen = len(grid) - 1
    for i, (lhs, rhs) in enumerate(pairs):
        if lhs - rhs > violation_tolerance(rhs):
            chosen = i
            break
    eps = grid[chosen]
    fam = sgm_square_family(eps)
    lhs, rhs = pairs[chosen]
    return WitnessReport(
        InequalityKind.SGM_SQUARED,
        {"epsilon": eps, "s": s},
        phi.density, fam.A.astype(complex), _sym(fam.X @ fam.A @ fam.X).astype(complex),
        lhs, rhs,
        certificate=fam.X.astype(complex),
        extras={
            "slope": slope,
            "expected_slope": s / 2,
            "grid": list(grid),
            "margins": [l - r for l, r in pairs],
        },
    )


def _sq_gap(phi: TraceFunctional, eps: float) -> float:
    lhs, rhs = sgm_square_margin_family(phi, eps)
    return lhs * lhs - rhs * rhs


# -- the quadratic-square inequality Tr(S Y^2) <= (Tr S Y)^2 ----------------

QUAD_MODES = ("density", "trace_n")


def quad_square_witness(
    S: Any,
    mode: str = "density",
    t: float = 0.5,
    samples: int = 500,
    seed: int = 0,
) -> WitnessReport:
    """Violate ``Tr(S Y^2) <= (Tr(S Y))^2`` over positive definite ``Y``.

    ``mode="density"`` requires ``Tr S = 1`` and always finds a violation
    (``n >= 2``). ``mode="trace_n"`` requires ``Tr S = n``; a violation exists
    unless ``S = I``, in which case ``samples`` random PD ``Y`` are tried and
    the least satisfied one is reported.

    Singular test matrices are shifted by ``delta I``; the margin of both
    constructions does not depend on ``delta``.
    """
    phi = _functional(S)
    n = phi.dim
    if mode not in QUAD_MODES:
        raise InvalidConfig(f"mode must be one of {QUAD_MODES}, got {mode!r}")
    target = 1.0 if mode == "density" else float(n)
    tr = float(np.trace(phi.density).real)
    if abs(tr - target) > 1e-8:
        raise NormalizationError(f"{mode} mode needs Tr S = {target:g}, got {tr!r}")
    e = eig_hermitian(phi.density)
    w, V = e.eigenvalues, e.eigenvectors
    params: dict[str, float] = {}
    extras: dict[str, Any] = {"mode": mode}

    if mode == "density":
        if n >= 2 and w[-2] <= 1e-8 * (1 + w[-1]):
            # rank-one S = |v><v|: Y = [[1, t], [t, 1]] (+) 0 in a basis starting at v
            Q = V[:, ::-1]
            Y0 = np.zeros((n, n), dtype=complex)
            Y0[:2, :2] = [[1, t], [t, 1]]
            Y = _sym(Q @ Y0 @ Q.conj().T)
            params["t"] = t
            extras["construction"] = "rank_one_block"
        else:
            # some eigenvalue of S lies in (0, 1)
            Y = projector(V[:, -1])
            params["t"] = 1.0
            extras["construction"] = "projection"
    else:
        if np.max(np.abs(w - 1.0)) <= 1e-10:
            return _quad_random_search(phi, samples, seed, extras)
        Y = projector(V[:, 0])
        extras["construction"] = "min_eigenvector"

    delta = 0.0 if eig_hermitian(Y).eigenvalues[0] > 1e-12 else 1e-12
    Y = Y + delta * np.eye(n)
    params["delta"] = delta
    lhs, rhs = evaluate(InequalityKind.QUAD_SQUARE, phi, Y)
    return WitnessReport(InequalityKind.QUAD_SQUARE, params, phi.density, Y, None, lhs, rhs, extras=extras)


def _quad_random_search(phi: TraceFunctional, samples: int, seed: int, extras: dict[str, Any]) -> WitnessReport:
    if samples < 1:
        raise InvalidConfig("samples must be >= 1")
    sampler = Sampler(SamplerConfig(dim=phi.dim, seed=seed, count=samples), "quad_square")
    best = None
    for _ in range(samples):
        Y = sampler.pd()
        lhs, rhs = evaluate(InequalityKind.QUAD_SQUARE, phi, Y)
        if best is None or lhs - rhs > best[1] - best[2]:
            best = (Y, lhs, rhs)
    Y, lhs, rhs = best
    extras.update({"construction": "random_search", "samples": samples, "seed": seed})
    return WitnessReport(InequalityKind.QUAD_SQUARE, {}, phi.density, Y, None, lhs, rhs, extras=extras)


def run_witness(kind: InequalityKind | str, S: Any, **kwargs: Any) -> WitnessReport:
    kind = InequalityKind(kind)
    table: dict[InequalityKind, Callable[..., WitnessReport]] = {
        InequalityKind.BURES_AM: bures_witness,
        InequalityKind.SGM_CAUCHY_SCHWARZ: sgm_cs_witness,
        InequalityKind.SGM_SQUARED: sgm_square_witness,
        InequalityKind.SGM_ARITHMETIC: amean_witness,
        InequalityKind.QUAD_SQUARE: quad_square_witness,
    }
    if kind not in table:
        raise InvalidConfig(f"no witness construction for {kind.value}: it holds for every state")
    return table[kind](S, **kwargs)

