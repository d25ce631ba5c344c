"""Truncated variation of sampled paths.

For a path sampled on a grid, the supremum over partitions is attained on
grid points (the interpolant is monotone between samples), so everything
here works with the sample values only.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InstanceTooLargeError, InvalidParameterError
from .wiener import SampledPath

ORACLE_MAX_N = 4096


class Kind(enum.Enum):
    TV = "TV"
    UTV = "UTV"
    DTV = "DTV"


@dataclass(frozen=True)
class TruncationReport:
    value: float
    r: float
    kind: Kind
    n: int
    T: float
    indices: tuple[int, ...] = field(default=())

    def csv_row(self) -> str:
        return f"{self.kind.value},{self.r:.17g},{self.value:.17g},{self.n},{self.T:.17g}"


def _check_r(r):
    if not r >= 0:
        raise InvalidParameterError(f"truncation level must be non-negative, got {r}")


def tv_trunc(path: SampledPath, r: float) -> TruncationReport:
    """``TV^r``: sup over partitions of ``sum((|increment| - r)^+)``, in O(n)."""
    _check_r(r)
    value = _kernels.tv_automaton(path.values, float(r))
    return TruncationReport(value, float(r), Kind.TV, path.n, path.T)


def utv_trunc(path: SampledPath, r: float) -> TruncationReport:
    """Upward truncated variation, in O(n)."""
    _check_r(r)
    value = _kernels.utv_automaton(path.values, float(r))
    return TruncationReport(value, float(r), Kind.UTV, path.n, path.T)


def dtv_trunc(path: SampledPath, r: float) -> TruncationReport:
    """Downward truncated variation, i.e. the upward one of ``-path``."""
    rep = utv_trunc(-path, r)
    return TruncationReport(rep.value, rep.r, Kind.DTV, rep.n, rep.T)


_PENALTY = {
    Kind.TV: lambda d, r: np.maximum(np.abs(d) - r, 0.0),
    Kind.UTV: lambda d, r: np.maximum(d - r, 0.0),
    Kind.DTV: lambda d, r: np.maximum(-d - r, 0.0),
}


def tv_trunc_oracle(path: SampledPath, r: float, kind: Kind = Kind.TV) -> TruncationReport:
    """Exact quadratic dynamic program over all increasing index subsequences.

    ``best[i]`` is the largest sum over subsequences ending at ``i``; the
    returned indices are one maximising subsequence.
    """
    _check_r(r)
    if path.n > ORACLE_MAX_N:
        raise InstanceTooLargeError(f"oracle is capped at n={ORACLE_MAX_N}, got {path.n}")
    x = path.values
    pen = _PENALTY[Kind(kind)]
    best = np.zeros(x.size)
    prev = np.full(x.size, -1)
    for i in range(1, x.size):
        cand = best[:i] + pen(x[i] - x[:i], r)
        j = int(np.argmax(cand))
        best[i] = cand[j]
        prev[i] = j
    end = int(np.argmax(best))
    chain = []
    i = end
    while i >= 0:
        chain.append(i)
        i = int(prev[i])
    chain.reverse()
    return TruncationReport(float(best[end]), float(r), Kind(kind), path.n, path.T, tuple(chain))
