"""Dense Hermitian linear algebra.

Matrices are plain ``complex128`` numpy arrays. Functions here never mutate
their arguments. Tolerances scale with the spectral radius because the
rank-one constructions mix eigenvalues of order one with regularizers far
below it.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import (
    AsymmetryError,
    ConvergenceError,
    DimensionMismatch,
    DomainError,
    LiteralFormatError,
)

ASYMMETRY_RTOL = 1e-8
PD_RTOL = 1e-10
PSD_RTOL = 1e-8
MAX_DIM = 256


def pd_tolerance(eigenvalues: np.ndarray) -> float:
    return PD_RTOL * (1.0 + float(np.max(np.abs(eigenvalues))))


def psd_tolerance(eigenvalues: np.ndarray) -> float:
    return PSD_RTOL * (1.0 + float(np.max(np.abs(eigenvalues))))


def _as_square(M: Any) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise DimensionMismatch(f"dimension {M.shape[0]} exceeds supported maximum {MAX_DIM}")
    return M


def _sym(M: np.ndarray) -> np.ndarray:
    # rounding cleanup for products that are Hermitian in exact arithmetic
    return 0.5 * (M + M.conj().T)


def hermitize(M: Any) -> np.ndarray:
    """Return ``(M + M*)/2`` after checking that ``M`` is nearly Hermitian.

    Raises:
        AsymmetryError: if ``||M - M*||_F > 1e-8 (1 + ||M||_F)``.
    """
    M = _as_square(M)
    defect = np.linalg.norm(M - M.conj().T)
    if defect > ASYMMETRY_RTOL * (1.0 + np.linalg.norm(M)):
        raise AsymmetryError(f"matrix is not Hermitian (||M - M*||_F = {defect:.3e})")
    return _sym(M)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues and unitary eigenvector matrix (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return _sym((V * self.eigenvalues) @ V.conj().T)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Return ``V diag(values) V*``."""
        V = self.eigenvectors
        return _sym((V * values) @ V.conj().T)


def eig_hermitian(H: Any) -> EigenDecomposition:
    H = _as_square(H)
    if not np.all(np.isfinite(H)):
        raise ConvergenceError("matrix has non-finite entries")
    try:
        w, V = np.linalg.eigh(H)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}") from exc
    return EigenDecomposition(w, V)


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"


@dataclass(frozen=True)
class DefinitenessClass:
    tag: Definiteness
    min_eigenvalue: float


def classify_definiteness(H: Any) -> DefinitenessClass:
    w = eig_hermitian(H).eigenvalues
    lo = float(w[0])
    if lo > pd_tolerance(w):
        tag = Definiteness.POSITIVE_DEFINITE
    elif lo > -psd_tolerance(w):
        tag = Definiteness.POSITIVE_SEMIDEFINITE
    else:
        tag = Definiteness.INDEFINITE
    return DefinitenessClass(tag, lo)


def _spectral_values(w: np.ndarray, kind: str, p: float | None) -> np.ndarray:
    if kind == "square":
        return w * w
    if kind == "sqrt":
        p = 0.5
    elif kind == "inv_sqrt":
        p = -0.5
    elif kind == "power":
        if p is None:
            raise ValueError("kind='power' requires an exponent p")
        p = float(p)
        if p == int(p) and p >= 0:
            return w ** int(p)
    else:
        raise ValueError(f"unknown spectral map {kind!r}")

    if p < 0:
        tol = pd_tolerance(w)
        if w[0] <= tol:
            raise DomainError(
                f"{kind} needs a positive definite matrix (min eigenvalue {w[0]:.3e} <= {tol:.3e})"
            )
        return w**p
    tol = psd_tolerance(w)
    if w[0] <= -tol:
        raise DomainError(
            f"{kind} needs a positive semidefinite matrix (min eigenvalue {w[0]:.3e})"
        )
    return np.clip(w, 0.0, None) ** p


def matrix_function(
    H: Any,
    kind: str,
    p: float | None = None,
    *,
    eig: EigenDecomposition | None = None,
) -> np.ndarray:
    """Apply a spectral map to a Hermitian matrix.

    Args:
        H: Hermitian matrix.
        kind: one of ``"sqrt"``, ``"inv_sqrt"``, ``"square"``, ``"power"``.
        p: exponent, only for ``kind="power"``.
        eig: precomputed decomposition of ``H``, to skip the eigensolve.

    Eigenvalues in ``(-psd_tolerance, 0)`` are clipped to zero for
    non-negative fractional powers. Negative powers need ``H`` positive
    definite beyond ``pd_tolerance``.

    Raises:
        DomainError: eigenvalues outside the admissible range for ``kind``.
    """
    if eig is None:
        eig = eig_hermitian(H)
    return eig.apply(_spectral_values(eig.eigenvalues, kind, p))


def sqrtm(H: Any) -> np.ndarray:
    return matrix_function(H, "sqrt")


def inv_sqrtm(H: Any) -> np.ndarray:
    return matrix_function(H, "inv_sqrt")


def gram_sqrt(W: np.ndarray) -> np.ndarray:
    """Return ``(W W*)^{1/2}`` from the SVD of ``W``.

    Singular values of ``W`` are accurate to ``eps * ||W||`` whereas square
    roots of eigenvalues of ``W W*`` only reach ``sqrt(eps) * ||W||``; this
    matters for rank-deficient inputs such as pure states.
    """
    try:
        U, sv, _ = np.linalg.svd(W)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"SVD failed: {exc}") from exc
    return _sym((U * sv) @ U.conj().T)


def trace(H: Any) -> float:
    H = _as_square(H)
    t = np.trace(H)
    if abs(t.imag) > 1e-10 * (1.0 + np.linalg.norm(H)):
        raise AsymmetryError(f"trace has imaginary part {t.imag:.3e}")
    return float(t.real)


def _check_same_shape(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")


def hs_inner(A: Any, B: Any) -> complex:
    """Hilbert-Schmidt inner product ``Tr(A* B)``."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    _check_same_shape(A, B)
    return complex(np.vdot(A, B))


def frobenius_norm(H: Any) -> float:
    return float(np.linalg.norm(np.asarray(H, dtype=complex)))


def mat_mul(A: Any, B: Any) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply shapes {A.shape} and {B.shape}")
    return A @ B


def mat_add(A: Any, B: Any) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    _check_same_shape(A, B)
    return A + B


def scalar_mul(c: complex, A: Any) -> np.ndarray:
    return c * np.asarray(A, dtype=complex)


def conj_transpose(A: Any) -> np.ndarray:
    return np.asarray(A, dtype=complex).conj().T


def commutator_norm(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A @ B - B @ A))


def projector(u: np.ndarray) -> np.ndarray:
    """Rank-one projection ``|u><u|`` onto the normalized vector ``u``."""
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.norm(u)
    return np.outer(u, u.conj())


# -- matrix literal format: {"n": int, "re": [[...]], "im": [[...]]} ---------


def matrix_to_literal(M: Any) -> dict[str, Any]:
    M = np.asarray(M, dtype=complex)
    lit: dict[str, Any] = {"n": int(M.shape[0]), "re": M.real.tolist()}
    if np.any(M.imag != 0):
        lit["im"] = M.imag.tolist()
    return lit


def _parse_block(rows: Any, n: int, key: str) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise LiteralFormatError(f"{key!r} is not a numeric matrix") from exc
    if arr.shape != (n, n):
        raise LiteralFormatError(f"{key!r} has shape {arr.shape}, expected ({n}, {n})")
    return arr


def matrix_from_literal(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "re" not in obj:
        raise LiteralFormatError('matrix literal must be an object with keys "n" and "re"')
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or not 1 <= n <= MAX_DIM:
        raise LiteralFormatError(f'"n" must be an integer in [1, {MAX_DIM}], got {n!r}')
    re = _parse_block(obj["re"], n, "re")
    im = _parse_block(obj["im"], n, "im") if obj.get("im") is not None else np.zeros((n, n))
    return re + 1j * im


def load_matrix(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LiteralFormatError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LiteralFormatError(f"{path}: invalid JSON ({exc})") from exc
    return matrix_from_literal(obj)


def dump_matrix(M: Any, path: str | Path) -> None:
    Path(path).write_text(json.dumps(matrix_to_literal(M)) + "\n")
