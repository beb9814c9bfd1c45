"""Deterministic random streams.

Every stream is a PCG64 generator whose seed is derived from a master seed
and a stream name, so adding a new named stream never shifts existing ones.
Gaussians come from Box-Muller on the uniform stream rather than numpy's
ziggurat sampler, to keep the transformation explicit and fixed.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, name: str) -> int:
    digest = hashlib.blake2b(f"{int(master)}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def generator(master: int, name: str = "") -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master, name)))


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` independent N(0, 1) draws by Box-Muller."""
    m = (size + 1) // 2
    u1 = rng.random(m)
    u2 = rng.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1]
    t = 2.0 * np.pi * u2
    return np.concatenate([r * np.cos(t), r * np.sin(t)])[:size]


def complex_gaussian(rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    """Complex array whose real and imaginary parts are independent N(0, 1)."""
    size = int(np.prod(shape))
    z = standard_normal(rng, 2 * size)
    return (z[0::2] + 1j * z[1::2]).reshape(shape)
