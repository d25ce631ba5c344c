"""Taut strings in a tube of fixed width around a sampled path."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels
from .errors import InvalidParameterError, OutOfDomainError
from .wiener import SampledPath, write_xy_csv


class Boundary(enum.Enum):
    PINNED_BOTH = "pinned"
    """h(0) = 0 and h(T) = W(T)."""
    PINNED_LEFT_FREE_RIGHT = "free-right"
    """h(0) = 0 only."""
    FREE = "free"
    """No endpoint constraint (the lazy function of truncated variation)."""


@dataclass(frozen=True)
class TubeSpec:
    r: float
    boundary: Boundary = Boundary.PINNED_BOTH

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidParameterError(f"tube width must be positive, got {self.r}")

    @property
    def tol(self) -> float:
        return 1e-9 * max(1.0, self.r)


@dataclass(frozen=True, eq=False)
class PiecewiseLinearPath:
    """Continuous piecewise-linear function given by its knots."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if t.ndim != 1 or t.shape != v.shape or t.size < 2:
            raise InvalidParameterError("need matching knot arrays with at least two knots")
        if t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise InvalidParameterError("knot times must start at 0 and increase strictly")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    @property
    def durations(self) -> np.ndarray:
        return np.diff(self.times)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.times)

    def __len__(self):
        return self.times.size

    def to_csv(self, fh: TextIO) -> None:
        write_xy_csv(fh, self.times, self.values, ("time", "value"))

    def derivative_to_csv(self, fh: TextIO) -> None:
        fh.write("start,end,slope\n")
        for a, b, s in zip(self.times[:-1].tolist(), self.times[1:].tolist(), self.slopes.tolist()):
            fh.write(f"{a:.17g},{b:.17g},{s:.17g}\n")


def evaluate(pl: PiecewiseLinearPath, t):
    """Value of ``pl`` at time(s) ``t`` by linear interpolation."""
    ta = np.asarray(t, dtype=np.float64)
    if np.any(ta < 0) or np.any(ta > pl.T) or np.any(np.isnan(ta)):
        raise OutOfDomainError(f"evaluation time outside [0, {pl.T}]")
    out = np.interp(ta, pl.times, pl.values)
    return float(out) if out.ndim == 0 else out


def barriers(path: SampledPath, tube: TubeSpec) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper barrier values at the grid points, endpoints applied."""
    half = 0.5 * tube.r
    lo = path.values - half
    up = path.values + half
    if tube.boundary is not Boundary.FREE:
        lo[0] = up[0] = 0.0
    if tube.boundary is Boundary.PINNED_BOTH:
        lo[-1] = up[-1] = path.values[-1]
    return lo, up


def taut_string(path: SampledPath, tube: TubeSpec) -> PiecewiseLinearPath:
    """Taut string of ``path`` in the tube ``|h - W| <= r/2``.

    The barriers are the grid values ``W[k] +- r/2`` joined linearly, so the
    result is exact for the piecewise-linear interpolant of the samples and
    simultaneously minimises ``sum(phi(h')) dt`` for every convex ``phi``
    (for the pinned problem). Knots sit on grid points where the string
    touches a barrier, plus the two endpoints. Linear time.
    """
    lo, up = barriers(path, tube)
    kx, ky = _kernels.taut_string_kernel(
        lo, up,
        tube.boundary is Boundary.FREE,
        tube.boundary is not Boundary.PINNED_BOTH,
    )
    times = kx / path.n * path.T
    return PiecewiseLinearPath(times, ky)


def max_deviation(pl: PiecewiseLinearPath, path: SampledPath) -> float:
    """Largest ``|pl - W|`` over the grid points of ``path``."""
    return float(np.max(np.abs(evaluate(pl, path.times) - path.values)))


def make_pseudostring(path: SampledPath, inner: PiecewiseLinearPath, delta: float) -> PiecewiseLinearPath:
    """Glue ``inner`` to the pinned endpoints through unit-length connectors.

    On ``[0, 1]`` the output is ``w(t) + (inner(1) - W(1)) t`` where ``w`` is
    a smoothed copy of the path kept within ``delta/2`` of it and matching it
    at 0 and 1; ``[T-1, T]`` is the mirror image. In between it equals
    ``inner``. If ``inner`` lies in the ``r``-tube, the result lies in the
    ``(r + delta)``-tube and is pinned at both ends.
    """
    if not path.T > 2:
        raise InvalidParameterError(f"pseudostring needs T > 2, got {path.T}")
    if not delta > 0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    if abs(inner.T - path.T) > 1e-9 * path.T:
        raise InvalidParameterError("inner path and sampled path have different horizons")
    n = path.n
    m = int(math.floor(1.0 / path.dt + 1e-9))
    if m < 1 or 2 * m >= n:
        raise InvalidParameterError("grid too coarse for unit connectors")
    t = path.times
    w = path.values

    def smoothed(seg: np.ndarray) -> np.ndarray:
        k = max(1, seg.size // 20)
        kernel = np.ones(2 * k + 1) / (2 * k + 1)
        sm = np.convolve(np.pad(seg, k, mode="edge"), kernel, mode="valid")
        sm = np.clip(sm, seg - 0.5 * delta, seg + 0.5 * delta)
        sm[0], sm[-1] = seg[0], seg[-1]
        return sm

    left_t = t[: m + 1]
    left = smoothed(w[: m + 1]) + (evaluate(inner, t[m]) - w[m]) * (left_t / t[m])
    right_t = t[n - m :]
    span = t[n] - t[n - m]
    right = smoothed(w[n - m :]) + (evaluate(inner, t[n - m]) - w[n - m]) * ((t[n] - right_t) / span)

    mid = (inner.times > t[m]) & (inner.times < t[n - m])
    times = np.concatenate([left_t, inner.times[mid], right_t])
    values = np.concatenate([left, inner.values[mid], right])
    values[0] = 0.0
    values[-1] = w[n]
    return PiecewiseLinearPath(times, values)
