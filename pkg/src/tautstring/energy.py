"""Energy functionals ``G(h) = integral of phi(h'(t)) dt`` for piecewise-linear h."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .taut_string import PiecewiseLinearPath

# exp(x) for x above this is reported as infinite energy
EXP_OVERFLOW = 700.0

_KINDS = ("power", "rhoplus", "rhominus", "kappa", "graphlen", "exp", "linear")


@dataclass(frozen=True)
class PhiSpec:
    """A convex (or affine) integrand ``phi`` from a small closed family.

    ==========  ========================  ==================
    kind        phi(u)                    params
    ==========  ========================  ==================
    power       ``|u|**p``, p >= 1        (p,)
    rhoplus     ``max(u - mu, 0)``        (mu,)
    rhominus    ``max(mu - u, 0)``        (mu,)
    kappa       ``|u - mu|``              (mu,)
    graphlen    ``sqrt(1 + u**2)``        ()
    exp         ``exp(lam * scale * u)``  (lam, scale)
    linear      ``a * u + b``             (a, b)
    ==========  ========================  ==================
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidParameterError(f"unknown phi kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind == "power" and not self.params[0] >= 1:
            raise InvalidParameterError("power phi needs p >= 1")

    @classmethod
    def power(cls, p: float) -> "PhiSpec":
        return cls("power", (p,))

    @classmethod
    def rho_plus(cls, mu: float) -> "PhiSpec":
        return cls("rhoplus", (mu,))

    @classmethod
    def rho_minus(cls, mu: float) -> "PhiSpec":
        return cls("rhominus", (mu,))

    @classmethod
    def kappa(cls, mu: float) -> "PhiSpec":
        return cls("kappa", (mu,))

    @classmethod
    def graph_length(cls) -> "PhiSpec":
        return cls("graphlen", ())

    @classmethod
    def exponential(cls, lam: float, scale: float = 1.0) -> "PhiSpec":
        return cls("exp", (lam, scale))

    @classmethod
    def linear(cls, a: float, b: float) -> "PhiSpec":
        return cls("linear", (a, b))

    @property
    def descriptor(self) -> str:
        if self.kind == "graphlen":
            return "graphlen"
        if self.kind == "exp":
            return f"exp:{self.params[0]:g}"
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def kinks(self) -> tuple[float, ...]:
        """Points where ``phi`` is not differentiable."""
        if self.kind in ("rhoplus", "rhominus", "kappa"):
            return (self.params[0],)
        if self.kind == "power" and self.params[0] < 2:
            return (0.0,)
        return ()

    @property
    def exp_rate(self) -> float:
        """Exponential growth rate of ``phi`` (0 unless kind is ``exp``)."""
        if self.kind == "exp":
            return self.params[0] * self.params[1]
        return 0.0

    def __call__(self, u):
        return phi_eval(self, u)


def parse_phi(text: str, r: float = 1.0) -> PhiSpec:
    """Parse ``power:p | rhoplus:mu | rhominus:mu | kappa:mu | graphlen | exp:lambda | linear:a,b``.

    ``exp:lambda`` means ``exp(lambda * r * u)``.
    """
    name, _, rest = text.strip().partition(":")
    args = [float(a) for a in rest.split(",")] if rest else []
    expected = {"power": 1, "rhoplus": 1, "rhominus": 1, "kappa": 1, "graphlen": 0, "exp": 1, "linear": 2}
    if name not in expected or len(args) != expected[name]:
        raise InvalidParameterError(f"bad phi descriptor {text!r}")
    if name == "exp":
        return PhiSpec.exponential(args[0], r)
    return PhiSpec(name, tuple(args))


def phi_eval(phi: PhiSpec, u):
    u = np.asarray(u, dtype=np.float64)
    k, p = phi.kind, phi.params
    if k == "power":
        out = np.abs(u) ** p[0]
    elif k == "rhoplus":
        out = np.maximum(u - p[0], 0.0)
    elif k == "rhominus":
        out = np.maximum(p[0] - u, 0.0)
    elif k == "kappa":
        out = np.abs(u - p[0])
    elif k == "graphlen":
        out = np.hypot(1.0, u)
    elif k == "exp":
        with np.errstate(over="ignore"):
            out = np.exp(p[0] * p[1] * u)
    else:
        out = p[0] * u + p[1]
    return float(out) if out.ndim == 0 else out


def energy(pl: PiecewiseLinearPath, phi: PhiSpec, start: float | None = None, stop: float | None = None) -> float:
    """``sum(phi(slope) * segment length)`` over ``[start, stop]`` (default: whole path).

    Returns ``inf`` when an exponential integrand would overflow.
    """
    slopes = pl.slopes
    a = pl.times[:-1]
    b = pl.times[1:]
    if start is not None or stop is not None:
        lo = 0.0 if start is None else start
        hi = pl.T if stop is None else stop
        a = np.clip(a, lo, hi)
        b = np.clip(b, lo, hi)
    lengths = b - a
    keep = lengths > 0
    slopes, lengths = slopes[keep], lengths[keep]
    if phi.kind == "exp" and np.any(phi.exp_rate * slopes > EXP_OVERFLOW):
        return math.inf
    return float(np.dot(phi_eval(phi, slopes), lengths))


def normalized_energy(pl: PiecewiseLinearPath, phi: PhiSpec) -> float:
    if not pl.T > 0:
        raise InvalidParameterError("path must span a positive horizon")
    return energy(pl, phi) / pl.T
