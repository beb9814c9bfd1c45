"""Positive linear functionals ``phi(X) = Tr(S X)`` and traciality diagnostics.

A functional on ``M_n`` is tracial exactly when it is unitarily invariant,
exactly when it is constant on rank-one projections, and then ``S = cI``.
The randomized diagnostics here measure how far each of these properties
fails, as continuous defects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DimensionMismatch, InvalidConfig, NormalizationError, NotPSDError
from .linalg import eig_hermitian, hermitize, psd_tolerance
from .rng import complex_gaussian, generator


@dataclass(frozen=True)
class TraceFunctional:
    """``phi(X) = Tr(S X)`` with ``S`` positive semidefinite, stored unnormalized."""

    density: np.ndarray

    def __post_init__(self) -> None:
        S = hermitize(self.density)
        w = eig_hermitian(S).eigenvalues
        if w[0] <= -psd_tolerance(w):
            raise NotPSDError(f"functional density is not PSD (min eigenvalue {w[0]:.3e})")
        object.__setattr__(self, "density", S)

    @property
    def dim(self) -> int:
        return self.density.shape[0]

    def __call__(self, X: Any) -> float:
        return apply(self, X)


def apply(phi: TraceFunctional, X: Any) -> float:
    """Return ``Re Tr(S X)``; the imaginary part must vanish for Hermitian ``X``."""
    X = np.asarray(X, dtype=complex)
    if X.shape != phi.density.shape:
        raise DimensionMismatch(f"functional has dim {phi.dim}, matrix has shape {X.shape}")
    # Tr(S X) = sum_ij S_ji X_ij
    val = np.sum(phi.density.T * X)
    scale = 1.0 + np.linalg.norm(phi.density) * np.linalg.norm(X)
    if abs(val.imag) > 1e-10 * scale:
        raise ValueError(f"Tr(SX) has imaginary part {val.imag:.3e}; is X Hermitian?")
    return float(val.real)


def normalize(phi: TraceFunctional, target_trace: float) -> TraceFunctional:
    """Rescale ``S`` so that ``Tr S = target_trace`` (1 for a state, n for the trace-n form)."""
    tr = float(np.trace(phi.density).real)
    if tr <= 0:
        raise NormalizationError("cannot normalize the zero functional")
    return TraceFunctional(phi.density * (target_trace / tr))


def _random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    G = complex_gaussian(rng, (n, n))
    return 0.5 * (G + G.conj().T)


def commutator_defect(phi: TraceFunctional, sample_count: int = 100, seed: int = 0) -> float:
    """Max of ``|phi(AB) - phi(BA)| / (1 + |A| |B| |S|)`` over random Hermitian pairs."""
    if sample_count < 1:
        raise InvalidConfig("sample_count must be >= 1")
    rng = generator(seed, "commutator_defect")
    n = phi.dim
    s_norm = np.linalg.norm(phi.density)
    worst = 0.0
    for _ in range(sample_count):
        A = _random_hermitian(rng, n)
        B = _random_hermitian(rng, n)
        # phi(AB) - phi(BA) = Tr(S[A, B]); AB is not Hermitian, so keep it complex
        d = abs(np.trace(phi.density @ (A @ B - B @ A)))
        worst = max(worst, d / (1.0 + np.linalg.norm(A) * np.linalg.norm(B) * s_norm))
    return float(worst)


def rank_one_spread(phi: TraceFunctional, sample_count: int = 100, seed: int = 0) -> float:
    """``max - min`` of ``phi(|w><w|)`` over random unit vectors ``w``."""
    if sample_count < 1:
        raise InvalidConfig("sample_count must be >= 1")
    rng = generator(seed, "rank_one_spread")
    values = []
    for _ in range(sample_count):
        w = complex_gaussian(rng, (phi.dim,))
        w /= np.linalg.norm(w)
        values.append(float(np.real(w.conj() @ phi.density @ w)))
    return max(values) - min(values)


@dataclass(frozen=True)
class TracialityVerdict:
    is_scalar: bool
    commutator_defect: float
    rank_one_spread: float
    scalar_c: float


def classify_traciality(
    phi: TraceFunctional, tol: float = 1e-10, sample_count: int = 100, seed: int = 0
) -> TracialityVerdict:
    """Decide whether ``S`` is a multiple of the identity.

    The verdict is spectral: ``lambda_max - lambda_min <= tol (1 + lambda_max)``.
    The two randomized defects are reported alongside for comparison.
    """
    return TracialityVerdict(
        is_scalar=is_scalar(phi, tol),
        commutator_defect=commutator_defect(phi, sample_count, seed),
        rank_one_spread=rank_one_spread(phi, sample_count, seed),
        scalar_c=float(np.trace(phi.density).real) / phi.dim,
    )


def is_scalar(phi: TraceFunctional, tol: float = 1e-10) -> bool:
    w = eig_hermitian(phi.density).eigenvalues
    return bool(w[-1] - w[0] <= tol * (1.0 + w[-1]))
