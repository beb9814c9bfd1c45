"""Seeded samplers for PD matrices, unit vectors, unitaries and density matrices."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, SamplerExhausted
from .rng import complex_gaussian, generator

log = logging.getLogger(__name__)

MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class SamplerConfig:
    dim: int
    seed: int
    count: int = 100
    pd_shift: float = 1e-3
    cond_cap: float = 1e12

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidConfig(f"dim must be >= 1, got {self.dim}")
        if self.count < 1:
            raise InvalidConfig(f"count must be >= 1, got {self.count}")
        if not self.pd_shift > 0:
            raise InvalidConfig(f"pd_shift must be > 0, got {self.pd_shift}")
        if not self.cond_cap > 1:
            raise InvalidConfig(f"cond_cap must be > 1, got {self.cond_cap}")


class Sampler:
    """A named, reproducible stream of random matrices.

    Two samplers built from equal configs and equal stream names produce
    bit-identical sequences.
    """

    def __init__(self, cfg: SamplerConfig, stream: str = ""):
        self.cfg = cfg
        self.rng = generator(cfg.seed, stream)
        self.draws = 0
        self.rejections = 0

    def gaussian(self, shape: tuple[int, ...]) -> np.ndarray:
        return complex_gaussian(self.rng, shape)

    def uniform(self, low: float = 0.0, high: float = 1.0, size: int | None = None):
        u = self.rng.random(size)
        return low + (high - low) * u

    def pd(self, n: int | None = None) -> np.ndarray:
        """``G G* + pd_shift I`` with complex Gaussian ``G``, resampled above ``cond_cap``."""
        n = n or self.cfg.dim
        for _ in range(MAX_ATTEMPTS):
            G = self.gaussian((n, n))
            P = G @ G.conj().T + self.cfg.pd_shift * np.eye(n)
            P = 0.5 * (P + P.conj().T)
            self.draws += 1
            w = np.linalg.eigvalsh(P)
            if w[-1] / w[0] <= self.cfg.cond_cap:
                return P
            self.rejections += 1
        raise SamplerExhausted(f"no matrix with condition <= {self.cfg.cond_cap:.1e} in {MAX_ATTEMPTS} draws")

    def hermitian(self, n: int | None = None) -> np.ndarray:
        n = n or self.cfg.dim
        G = self.gaussian((n, n))
        return 0.5 * (G + G.conj().T)

    def unit_vector(self, n: int | None = None) -> np.ndarray:
        n = n or self.cfg.dim
        z = self.gaussian((n,))
        return z / np.linalg.norm(z)

    def unitary(self, n: int | None = None) -> np.ndarray:
        """Orthonormalized Gaussian matrix; the first nonzero entry of each column is real positive."""
        n = n or self.cfg.dim
        Q, _ = np.linalg.qr(self.gaussian((n, n)))
        for j in range(n):
            k = int(np.flatnonzero(np.abs(Q[:, j]) > 0)[0])
            r = abs(Q[k, j])
            Q[:, j] *= np.conj(Q[k, j]) / r
            Q[k, j] = r  # exactly real after the rotation
        return Q

    def density(self, n: int | None = None) -> np.ndarray:
        P = self.pd(n)
        return P / np.trace(P).real

    def pure_density(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        u = self.unit_vector(n)
        return u, np.outer(u, u.conj())

    def commuting_pd_pair(self, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Two PD matrices sharing a random eigenbasis, eigenvalues in [0.5, 2]."""
        n = n or self.cfg.dim
        U = self.unitary(n)
        a = self.uniform(0.5, 2.0, n)
        b = self.uniform(0.5, 2.0, n)
        A = (U * a) @ U.conj().T
        B = (U * b) @ U.conj().T
        return 0.5 * (A + A.conj().T), 0.5 * (B + B.conj().T)

    def log_acceptance(self, name: str) -> None:
        if self.draws:
            log.info(
                "%s: PD sampler accepted %d/%d draws (%.1f%%)",
                name, self.draws - self.rejections, self.draws,
                100.0 * (self.draws - self.rejections) / self.draws,
            )


def random_pd(cfg: SamplerConfig) -> np.ndarray:
    return Sampler(cfg, "random_pd").pd()


def random_unit_vector(cfg: SamplerConfig) -> np.ndarray:
    return Sampler(cfg, "random_unit_vector").unit_vector()


def random_unitary(cfg: SamplerConfig) -> np.ndarray:
    return Sampler(cfg, "random_unitary").unitary()


def random_density(cfg: SamplerConfig) -> np.ndarray:
    return Sampler(cfg, "random_density").density()
