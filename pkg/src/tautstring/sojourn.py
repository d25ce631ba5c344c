"""Occupation measure of the taut-string derivative versus its limit law."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from .closed_forms import _SERIES_RADIUS, _XCOTH_SERIES
from .errors import InvalidParameterError
from .taut_string import PiecewiseLinearPath


@dataclass(frozen=True, eq=False)
class SojournMeasure:
    """Atoms ``(slope, time spent at that slope)``, sorted by slope, slopes distinct."""

    slopes: np.ndarray
    weights: np.ndarray
    T: float

    def integrate(self, f) -> float:
        """``integral of f d(nu_T)``, i.e. the time average of ``f(h')``."""
        return float(np.dot(f(self.slopes), self.weights) / self.T)

    def to_csv(self, fh: TextIO) -> None:
        fh.write("slope,weight\n")
        for s, w in zip(self.slopes.tolist(), self.weights.tolist()):
            fh.write(f"{s:.17g},{w:.17g}\n")


def _collapse(slopes, weights, T) -> SojournMeasure:
    order = np.argsort(slopes, kind="stable")
    s = slopes[order]
    w = weights[order]
    uniq, start = np.unique(s, return_index=True)
    return SojournMeasure(uniq, np.add.reduceat(w, start), float(T))


def sojourn_measure(pl: PiecewiseLinearPath) -> SojournMeasure:
    """One atom per segment, equal slopes merged."""
    return _collapse(pl.slopes, pl.durations, pl.T)


def merge_measures(measures: Iterable[SojournMeasure]) -> SojournMeasure:
    """Pool several measures as if their time axes were concatenated."""
    ms = list(measures)
    if not ms:
        raise InvalidParameterError("nothing to merge")
    return _collapse(
        np.concatenate([m.slopes for m in ms]),
        np.concatenate([m.weights for m in ms]),
        sum(m.T for m in ms),
    )


def empirical_tail(m: SojournMeasure, v) -> float:
    """``nu_T[v, inf)``; atoms at exactly ``v`` count."""
    cum = np.concatenate([np.cumsum(m.weights[::-1])[::-1], [0.0]]) / m.T
    idx = np.searchsorted(m.slopes, v, side="left")
    out = cum[idx]
    return float(out) if np.ndim(out) == 0 else out


def limit_tail(v, r: float):
    """``nu_inf[v, inf) = -d/dv q_limit(v, r)``.

    With ``x = 2 r v`` and ``e = exp(-x)`` this is
    ``x e / (1 - e)**2 - e / (1 - e)`` for ``v > 0``, equal to
    ``(1 - coth(rv) + rv / sinh(rv)**2) / 2``; negative ``v`` uses
    ``1 - tail(-v)``. For ``|rv| < 0.5`` the two terms cancel, so the tail is
    ``1/2 - sum_k k c_k (rv)**(2k-1)`` from the series ``y coth y = 1 + sum_k c_k y**(2k)``.
    """
    if not r > 0:
        raise InvalidParameterError(f"r must be positive, got {r}")
    v = np.asarray(v, dtype=np.float64)
    y = r * v
    small = np.abs(y) < _SERIES_RADIUS
    xs = np.where(small, 1.0, 2.0 * np.abs(y))
    with np.errstate(over="ignore", invalid="ignore"):
        e = np.exp(-xs)
        ome = -np.expm1(-xs)
        pos = xs * e / ome**2 - e / ome
    pos = np.where(np.isfinite(xs) & (xs < 1400.0), pos, 0.0)
    tail = np.where(y >= 0, pos, 1.0 - pos)
    yt = np.where(small, y, 0.0)
    y2 = yt * yt
    poly = np.zeros_like(y2)
    for k in range(len(_XCOTH_SERIES), 0, -1):
        poly = poly * y2 + k * _XCOTH_SERIES[k - 1]
    out = np.where(small, 0.5 - yt * poly, tail)
    return float(out) if out.ndim == 0 else out


def ks_distance(m: SojournMeasure, r: float) -> float:
    """Sup distance between ``nu_T[v, inf)`` and ``nu_inf[v, inf)`` over all ``v``.

    The empirical tail is a step function, so the sup is attained at an atom
    (closed tail) or just to its right (open tail).
    """
    lim = limit_tail(m.slopes, r)
    closed = np.cumsum(m.weights[::-1])[::-1] / m.T
    open_ = closed - m.weights / m.T
    return float(max(np.max(np.abs(closed - lim)), np.max(np.abs(open_ - lim))))


def tail_comparison_csv(m: SojournMeasure, r: float, fh: TextIO) -> None:
    fh.write("v,empirical,limit\n")
    emp = empirical_tail(m, m.slopes)
    lim = limit_tail(m.slopes, r)
    for v, a, b in zip(m.slopes.tolist(), np.atleast_1d(emp).tolist(), np.atleast_1d(lim).tolist()):
        fh.write(f"{v:.17g},{a:.17g},{b:.17g}\n")
