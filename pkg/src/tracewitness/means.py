"""Matrix means on the positive definite cone, and Uhlmann fidelity.

``A # B`` is the Kubo-Ando metric geometric mean, ``A ♮ B`` the
Fiedler-Ptak spectral geometric mean ``(A^{-1} # B)^{1/2} A (A^{-1} # B)^{1/2}``.
Both refuse inputs whose condition number exceeds :data:`COND_CAP`.
"""

from __future__ import annotations

import enum
from typing import Any

import numpy as np

from .errors import (
    ConditionError,
    ConvergenceError,
    DimensionMismatch,
    NotDensityError,
    NotPDError,
    NotPSDError,
)
from .linalg import (
    EigenDecomposition,
    _sym,
    eig_hermitian,
    gram_sqrt,
    hermitize,
    matrix_function,
    pd_tolerance,
    psd_tolerance,
)

COND_CAP = 1e12
DENSITY_TRACE_TOL = 1e-10


class MeanKind(enum.Enum):
    ARITHMETIC = "arithmetic"
    METRIC_GEOMETRIC = "metric"
    SPECTRAL_GEOMETRIC = "spectral"
    BURES_CROSS = "bures"


def _pd_eig(M: Any, name: str, cond_cap: float | None = COND_CAP) -> tuple[np.ndarray, EigenDecomposition]:
    H = hermitize(M)
    e = eig_hermitian(H)
    w = e.eigenvalues
    if w[0] <= pd_tolerance(w):
        raise NotPDError(f"{name} is not positive definite (min eigenvalue {w[0]:.3e})")
    if cond_cap is not None and w[-1] / w[0] > cond_cap:
        raise ConditionError(f"{name} has condition number {w[-1] / w[0]:.3e} > {cond_cap:.0e}")
    return H, e


def _psd_eig(M: Any, name: str) -> tuple[np.ndarray, EigenDecomposition]:
    H = hermitize(M)
    e = eig_hermitian(H)
    if e.eigenvalues[0] <= -psd_tolerance(e.eigenvalues):
        raise NotPSDError(f"{name} is not positive semidefinite (min eigenvalue {e.eigenvalues[0]:.3e})")
    return H, e


def _same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")


def arithmetic_mean(A: Any, B: Any) -> np.ndarray:
    A, _ = _pd_eig(A, "A", cond_cap=None)
    B, _ = _pd_eig(B, "B", cond_cap=None)
    _same_dim(A, B)
    return 0.5 * (A + B)


def metric_geomean(A: Any, B: Any) -> np.ndarray:
    """Kubo-Ando geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``."""
    A, ea = _pd_eig(A, "A")
    B, _ = _pd_eig(B, "B")
    _same_dim(A, B)
    a_half = matrix_function(A, "sqrt", eig=ea)
    a_ihalf = matrix_function(A, "inv_sqrt", eig=ea)
    core = matrix_function(_sym(a_ihalf @ B @ a_ihalf), "sqrt")
    return _sym(a_half @ core @ a_half)


def riccati_solution(A: Any, B: Any) -> np.ndarray:
    """Return the positive definite ``X`` with ``X A X = B``, i.e. ``A^{-1} # B``.

    Computed as ``A^{-1/2} (A^{1/2} B A^{1/2})^{1/2} A^{-1/2}``, which is the
    metric mean formula applied to ``A^{-1}`` without forming the inverse.
    """
    A, ea = _pd_eig(A, "A")
    B, _ = _pd_eig(B, "B")
    _same_dim(A, B)
    a_half = matrix_function(A, "sqrt", eig=ea)
    a_ihalf = matrix_function(A, "inv_sqrt", eig=ea)
    core = matrix_function(_sym(a_half @ B @ a_half), "sqrt")
    return _sym(a_ihalf @ core @ a_ihalf)


def sgm_from_riccati(A: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``X^{1/2} A X^{1/2}``: the spectral geometric mean of ``A`` and ``X A X``."""
    x_half = matrix_function(X, "sqrt")
    return _sym(x_half @ A @ x_half)


def spectral_geomean(A: Any, B: Any) -> np.ndarray:
    """Spectral geometric mean ``(A^{-1} # B)^{1/2} A (A^{-1} # B)^{1/2}``."""
    X = riccati_solution(A, B)
    return sgm_from_riccati(hermitize(A), X)


def bures_cross(A: Any, B: Any) -> np.ndarray:
    """``(A^{1/2} B A^{1/2})^{1/2}``; positive semidefinite inputs are accepted."""
    A, ea = _psd_eig(A, "A")
    B, eb = _psd_eig(B, "B")
    _same_dim(A, B)
    a_half = matrix_function(A, "sqrt", eig=ea)
    b_half = matrix_function(B, "sqrt", eig=eb)
    return gram_sqrt(a_half @ b_half)


def mean(kind: MeanKind | str, A: Any, B: Any) -> np.ndarray:
    kind = MeanKind(kind)
    return {
        MeanKind.ARITHMETIC: arithmetic_mean,
        MeanKind.METRIC_GEOMETRIC: metric_geomean,
        MeanKind.SPECTRAL_GEOMETRIC: spectral_geomean,
        MeanKind.BURES_CROSS: bures_cross,
    }[kind](A, B)


def as_density(rho: Any, name: str = "rho") -> np.ndarray:
    """Validate a density matrix: Hermitian, PSD, unit trace within 1e-10."""
    try:
        H, e = _psd_eig(rho, name)
    except NotPSDError as exc:
        raise NotDensityError(str(exc)) from exc
    tr = float(np.trace(H).real)
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise NotDensityError(f"{name} has trace {tr!r}, expected 1")
    return H


def fidelity_amplitude(rho: Any, sigma: Any) -> float:
    """``Tr sqrt(sqrt(rho) sigma sqrt(rho))``.

    Evaluated as the nuclear norm of ``sqrt(sigma) sqrt(rho)``, which equals
    the trace above and stays accurate at rank-deficient states.
    """
    rho = as_density(rho, "rho")
    sigma = as_density(sigma, "sigma")
    _same_dim(rho, sigma)
    W = matrix_function(sigma, "sqrt") @ matrix_function(rho, "sqrt")
    try:
        sv = np.linalg.svd(W, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc
    return float(np.sum(sv))


def fidelity(rho: Any, sigma: Any) -> float:
    return fidelity_amplitude(rho, sigma) ** 2
