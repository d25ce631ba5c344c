"""Seeded Wiener paths on uniform grids."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .errors import InvalidParameterError

# Expected gap between the running maximum of Brownian motion and its
# maximum over a grid of step dt is BARRIER_SHIFT * sqrt(dt) as dt -> 0.
# BARRIER_SHIFT = -zeta(1/2) / sqrt(2 pi).
BARRIER_SHIFT = 0.5825971579390107


@dataclass(frozen=True)
class SeedSpec:
    """(master seed, replicate index) pair keying one generator stream."""

    master: int
    replicate: int = 0

    def __post_init__(self):
        if not 0 <= self.master < 2**64:
            raise InvalidParameterError("master seed must be a 64-bit unsigned integer")
        if self.replicate < 0:
            raise InvalidParameterError("replicate index must be non-negative")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master, spawn_key=(self.replicate,))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True, eq=False)
class SampledPath:
    """Path values on the grid ``k * T / n``, ``k = 0..n``, starting at 0."""

    T: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 2:
            raise InvalidParameterError("a path needs at least two samples")
        if not self.T > 0:
            raise InvalidParameterError(f"horizon must be positive, got {self.T}")
        if values[0] != 0.0:
            raise InvalidParameterError("path must start at 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "T", float(self.T))

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n * self.T

    def __neg__(self) -> "SampledPath":
        return SampledPath(self.T, -self.values)

    def prefix(self, k: int) -> "SampledPath":
        """The path restricted to the first ``k`` steps (horizon ``k * dt``)."""
        if not 1 <= k <= self.n:
            raise InvalidParameterError(f"prefix length {k} outside 1..{self.n}")
        return SampledPath(k * self.dt, self.values[: k + 1])

    def window(self, i0: int, i1: int) -> "SampledPath":
        """Steps ``i0..i1`` re-based to start at time 0 and value 0."""
        if not 0 <= i0 < i1 <= self.n:
            raise InvalidParameterError(f"bad window {i0}..{i1}")
        seg = self.values[i0 : i1 + 1]
        return SampledPath((i1 - i0) * self.dt, seg - seg[0])

    def subsample(self, stride: int) -> "SampledPath":
        """Every ``stride``-th sample of the same path (a coarser grid)."""
        if stride < 1 or self.n % stride:
            raise InvalidParameterError(f"stride {stride} does not divide n={self.n}")
        return SampledPath(self.T, self.values[::stride])

    def to_csv(self, fh: TextIO) -> None:
        write_xy_csv(fh, self.times, self.values, ("time", "value"))


def simulate_wiener(T: float, n: int, seed: SeedSpec) -> SampledPath:
    """Brownian motion sampled exactly at ``n`` uniform steps on ``[0, T]``."""
    if not T > 0:
        raise InvalidParameterError(f"T must be positive, got {T}")
    if n < 1:
        raise InvalidParameterError(f"n must be at least 1, got {n}")
    increments = seed.generator().standard_normal(n)
    increments *= math.sqrt(T / n)
    values = np.empty(n + 1)
    values[0] = 0.0
    np.cumsum(increments, out=values[1:])
    return SampledPath(T, values)


def add_drift(path: SampledPath, mu: float) -> SampledPath:
    """Return ``W(t) - mu * t`` on the same grid."""
    if mu == 0:
        return path
    return SampledPath(path.T, path.values - mu * path.times)


def effective_width(r: float, dt: float) -> float:
    """Tube width to use on a grid of step ``dt`` to mimic continuous monitoring.

    A grid sees the extremes of Brownian motion too late by about
    ``BARRIER_SHIFT * sqrt(dt)`` on each side, so a grid tube of width ``r``
    behaves like a continuous tube that is wider. Shrinking the grid tube by
    twice that amount removes the leading-order bias.
    """
    if not r > 0:
        raise InvalidParameterError(f"r must be positive, got {r}")
    width = r - 2.0 * BARRIER_SHIFT * math.sqrt(dt)
    if width <= 0:
        raise InvalidParameterError(f"grid step {dt} too coarse for width {r}")
    return width


def write_xy_csv(fh: TextIO, x, y, header) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    for a, b in zip(np.asarray(x).tolist(), np.asarray(y).tolist()):
        w.writerow((f"{a:.17g}", f"{b:.17g}"))


def read_xy_csv(fh: TextIO) -> tuple[np.ndarray, np.ndarray]:
    rows = list(csv.reader(fh))
    body = [r for r in rows[1:] if r]
    data = np.array([[float(a), float(b)] for a, b in body])
    return data[:, 0], data[:, 1]


def read_path_csv(fh: TextIO) -> SampledPath:
    """Read a (time, value) CSV written by :meth:`SampledPath.to_csv`."""
    t, v = read_xy_csv(fh)
    if not np.allclose(np.diff(t), t[-1] / (t.size - 1), rtol=1e-9, atol=1e-12):
        raise InvalidParameterError("path CSV is not on a uniform grid")
    return SampledPath(float(t[-1]), v)
