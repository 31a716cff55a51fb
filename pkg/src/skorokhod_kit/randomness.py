"""Counter-based random streams, initial laws, and Gaussian path generation.

Streams are keyed by (seed, stream): the Philox counter-based generator makes
each (seed, stream) pair a reproducible, independent source, so Monte Carlo
runs can hand one stream to each path and stay deterministic under any
worker layout. Normals come from the inverse CDF applied to 53-bit uniforms,
one uniform per normal, so a prefix of a stream always yields a prefix of
the same increment sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .errors import GenerationError
from .paths import SampledPath, TimeGrid

_U53 = np.uint64(1) << np.uint64(53)


@dataclass(frozen=True)
class RngSeed:
    """Key of one reproducible random stream."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed % (1 << 64), self.stream % (1 << 64)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def with_stream(self, stream: int) -> "RngSeed":
        return RngSeed(self.seed, stream)


def standard_normals(gen: np.random.Generator, n: int) -> np.ndarray:
    """n standard normals by inverse CDF, one 53-bit draw per value."""
    raw = gen.integers(0, _U53, size=n, dtype=np.uint64)
    u = (raw.astype(np.float64) + 0.5) / float(_U53)
    return ndtri(u)


def normal_matrix(rng: RngSeed, n_rows: int, n_cols: int, first_stream: int = 0) -> np.ndarray:
    """Row i holds the first n_cols normals of stream first_stream + i."""
    raw = np.empty((n_rows, n_cols), dtype=np.uint64)
    for i in range(n_rows):
        gen = rng.with_stream(first_stream + i).generator()
        raw[i] = gen.integers(0, _U53, size=n_cols, dtype=np.uint64)
    u = (raw.astype(np.float64) + 0.5) / float(_U53)
    return ndtri(u)


@dataclass(frozen=True)
class InitialLaw:
    """Distribution of a path's starting point: a point mass or a custom sampler.

    Custom samplers receive a numpy Generator and must return a length-d array.
    """

    point: np.ndarray | None = None
    sampler: Callable[[np.random.Generator, int], np.ndarray] | None = None

    def __post_init__(self):
        if (self.point is None) == (self.sampler is None):
            raise ValueError("exactly one of point, sampler must be given")
        if self.point is not None:
            object.__setattr__(
                self, "point", np.atleast_1d(np.asarray(self.point, dtype=np.float64))
            )

    @classmethod
    def point_mass(cls, x0) -> "InitialLaw":
        return cls(point=np.atleast_1d(np.asarray(x0, dtype=np.float64)))

    @classmethod
    def custom(cls, sampler: Callable[[np.random.Generator, int], np.ndarray]) -> "InitialLaw":
        return cls(sampler=sampler)

    def draw(self, gen: np.random.Generator, d: int) -> np.ndarray:
        if self.point is not None:
            if self.point.size == 1 and d > 1:
                return np.full(d, self.point[0])
            if self.point.size != d:
                raise ValueError("point mass dimension does not match d")
            return self.point.copy()
        x0 = np.atleast_1d(np.asarray(self.sampler(gen, d), dtype=np.float64))
        if x0.size != d:
            raise ValueError("custom sampler returned wrong dimension")
        return x0


def brownian_sample(grid: TimeGrid, d: int, law: InitialLaw, rng: RngSeed) -> SampledPath:
    """Brownian path on the grid: independent N(0, dt * I) increments.

    The starting point is drawn first, then increments left to right, so a
    truncated grid reproduces a prefix of the same path.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    gen = rng.generator()
    x0 = law.draw(gen, d)
    n_steps = len(grid) - 1
    z = standard_normals(gen, n_steps * d).reshape(n_steps, d)
    increments = z * np.sqrt(grid.deltas)[:, None]
    values = np.empty((len(grid), d))
    values[0] = x0
    np.cumsum(increments, axis=0, out=values[1:])
    values[1:] += x0
    if not np.all(np.isfinite(values)):
        raise GenerationError("brownian_sample produced a non-finite value")
    return SampledPath.continuous(grid, values)


def gaussian_kernel(t: float, x) -> float:
    """Centered Gaussian density (2*pi*t)^(-d/2) * exp(-|x|^2 / (2t))."""
    if not t > 0.0:
        raise ValueError("t must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    d = x.size
    return float((2.0 * np.pi * t) ** (-d / 2.0) * np.exp(-float(x @ x) / (2.0 * t)))
