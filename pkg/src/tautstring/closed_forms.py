"""Limit density of the taut-string derivative and related closed forms."""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .energy import PhiSpec, phi_eval
from .errors import InvalidParameterError, NonConvergentError

# below this |r u| the closed forms are replaced by their Taylor expansions
_SERIES_CUTOFF = 1e-4


def _check_r(r):
    if not r > 0:
        raise InvalidParameterError(f"r must be positive, got {r}")


# x coth x - 1 = sum_k c_k x^(2k), c_k = 4^k B_2k / (2k)!, radius of convergence pi
_XCOTH_SERIES = (
    1.0 / 3.0,
    -1.0 / 45.0,
    2.0 / 945.0,
    -1.0 / 4725.0,
    2.0 / 93555.0,
    -1382.0 / 638512875.0,
    4.0 / 18243225.0,
    -3617.0 / 162820783125.0,
    87734.0 / 38979295480125.0,
    -349222.0 / 1531329465290625.0,
)
# below this |r u| the series is used; at 0.5 the truncation error is ~1e-17 relative
_SERIES_RADIUS = 0.5


def p_infinity(u, r: float):
    """Limit density ``r (x coth x - 1) / sinh(x)**2`` with ``x = r u``; ``r/3`` at 0.

    For ``|x| >= 0.5`` it is written with ``e = exp(-2|x|)`` so it neither
    overflows nor cancels: ``4 r e (|x| (1 + e) / (1 - e) - 1) / (1 - e)**2``.
    Closer to 0 the numerator cancels, so ``x coth x - 1`` is summed from its
    Taylor series ``x**2/3 - x**4/45 + ...``; with ``sinh(x)**2 = x**2 + x**4/3 + ...``
    the leading terms are ``r (1/3 - 2 x**2 / 15)``.
    """
    _check_r(r)
    x = np.abs(np.asarray(u, dtype=np.float64) * r)
    small = x < _SERIES_RADIUS
    xs = np.where(small, 1.0, x)
    e = np.exp(-2.0 * xs)
    one_minus_e = -np.expm1(-2.0 * xs)
    big = 4.0 * e * (xs * (1.0 + e) / one_minus_e - 1.0) / one_minus_e**2
    xt = np.where(small, x, 0.0)
    x2 = xt * xt
    poly = np.zeros_like(x2)
    for c in reversed(_XCOTH_SERIES):
        poly = poly * x2 + c
    with np.errstate(invalid="ignore"):
        ratio = np.where(xt > 0, xt / np.sinh(xt), 1.0)
    out = r * np.where(small, poly * ratio * ratio, big)
    return float(out) if out.ndim == 0 else out


def m_limit(mu, r: float):
    """Almost-sure limit of ``TV^r / T`` for ``W(t) - mu t``: ``mu coth(r mu)``, ``1/r`` at 0."""
    _check_r(r)
    mu = np.asarray(mu, dtype=np.float64)
    x = mu * r
    small = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    out = np.where(small, (1.0 + x * x / 3.0) / r, mu / np.tanh(xs))
    return float(out) if out.ndim == 0 else out


def q_limit(mu, r: float):
    """Almost-sure limit of ``UTV^r / T``: ``(m_limit - mu) / 2``, ``1/(2r)`` at 0.

    Computed as ``mu / expm1(2 r mu)``, which equals the above and has no
    cancellation for large ``|mu|``.
    """
    _check_r(r)
    mu = np.asarray(mu, dtype=np.float64)
    x = 2.0 * r * mu
    small = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        big = mu / np.expm1(xs)
    out = np.where(small, (1.0 - x / 2.0 + x * x / 12.0) / (2.0 * r), big)
    return float(out) if out.ndim == 0 else out


def density_from_q(mu: float, r: float, h: float = 1e-4) -> float:
    """Central second difference of ``q_limit`` in ``mu``.

    ``q = (m - mu) / 2`` and the linear part has zero second difference, so
    only the even part ``m / 2`` is differenced; grouping ``(m(mu-h) + m(mu+h))``
    keeps the estimate exactly even in ``mu``.
    """
    _check_r(r)
    if not 0 < h <= 1e-3:
        raise InvalidParameterError(f"step must lie in (0, 1e-3], got {h}")
    outer = m_limit(mu - h, r) + m_limit(mu + h, r)
    return float((outer - 2.0 * m_limit(mu, r)) / (2.0 * h * h))


def _log_p_infinity(u, r):
    x = abs(u * r)
    if x < 1.0:
        return math.log(p_infinity(u, r))
    e = math.exp(-2.0 * x)
    one_minus_e = -math.expm1(-2.0 * x)
    return math.log(4.0 * r) - 2.0 * x + math.log(x * (1.0 + e) / one_minus_e - 1.0) - 2.0 * math.log(one_minus_e)


def _integrand(phi: PhiSpec, r: float):
    if phi.kind == "exp":
        rate = phi.exp_rate

        def f(u):
            lp = _log_p_infinity(u, r)
            return math.exp(lp + rate * u) + math.exp(lp - rate * u)
    else:

        def f(u):
            return (phi_eval(phi, u) + phi_eval(phi, -u)) * p_infinity(u, r)
    return f


def integrate_against_p_inf(phi: PhiSpec, r: float, rtol: float = 1e-10) -> float:
    """``integral of phi(u) p_infinity(u) du`` over the real line.

    Folded onto ``[0, U]`` as ``(phi(u) + phi(-u)) p(u)`` and integrated with
    adaptive Gauss-Kronrod; ``U`` grows until the integrand at ``U`` is below
    ``1e-16`` of the running integral. Returns ``inf`` when ``phi`` grows at
    least as fast as ``exp(2 r |u|)``, the decay rate of the density.
    """
    _check_r(r)
    if phi.kind == "exp" and abs(phi.exp_rate) >= 2.0 * r:
        return math.inf
    f = _integrand(phi, r)
    breaks = sorted({abs(k) for k in phi.kinks if k != 0})
    total, err = 0.0, 0.0
    upper = 8.0 / r
    for b in breaks:
        if b > upper:
            upper = 2.0 * b
    edges = [0.0] + breaks
    while True:
        pts = [e for e in edges if e < upper] + [upper]
        seg_total, seg_err = 0.0, 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            val, e, *_ = integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=400, full_output=1)
            seg_total += val
            seg_err += e
        total, err = seg_total, seg_err
        if abs(f(upper)) <= 1e-16 * max(abs(total), 1e-300) or upper > 2000.0 / r:
            break
        upper *= 1.5
    if err > rtol * max(abs(total), 1.0):
        raise NonConvergentError(f"quadrature error {err:.3g} for {phi.descriptor}")
    return total
