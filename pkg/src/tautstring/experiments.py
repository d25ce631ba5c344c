"""Monte Carlo experiments for the long-horizon limit laws.

Every replicate draws one path on ``[0, max(T)]`` from its own seeded
stream; shorter horizons use prefixes of that path. Replicates run on a
thread pool (the compiled kernels release the GIL) and are reduced in
replicate order, so results do not depend on the worker count.
"""
from __future__ import annotations

import dataclasses
import math
import os
import platform
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import stats

from .closed_forms import integrate_against_p_inf, m_limit, q_limit
from .energy import PhiSpec, energy, parse_phi, phi_eval
from .errors import ConfigurationError, InvalidParameterError
from .sojourn import ks_distance, sojourn_measure
from .taut_string import TubeSpec, taut_string
from .truncated_variation import tv_trunc, utv_trunc
from .wiener import SampledPath, SeedSpec, add_drift, effective_width, simulate_wiener

EXPERIMENTS = ("energy-convergence", "tv-lln", "sojourn-convergence", "divergence-probe")

# bias of grid estimates shrinks like sqrt(dt); halving the grid multiplies it by sqrt(2)
_RICHARDSON = 1.0 / (math.sqrt(2.0) - 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    r: float = 1.0
    T_list: tuple[float, ...] = (250.0, 500.0, 1000.0, 2000.0)
    steps_per_unit: int = 500
    replicates: int = 50
    seed: int = 0
    mu_list: tuple[float, ...] = (0.0, 0.5, 1.0)
    phis: tuple[str, ...] = ("power:2",)
    out_dir: str | None = None
    # shrink the grid tube so it mimics a continuously monitored one
    barrier_correction: bool = True
    # also evaluate every path on the grid with twice the step (bias estimate)
    refinement: bool = True

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.name!r}; choose from {EXPERIMENTS}")
        if not self.r > 0:
            raise ConfigurationError("r must be positive")
        if self.replicates < 1:
            raise ConfigurationError("need at least one replicate")
        if self.steps_per_unit < 1 or not self.T_list:
            raise ConfigurationError("need a positive step density and at least one horizon")
        object.__setattr__(self, "T_list", tuple(sorted(float(t) for t in self.T_list)))
        for T in self.T_list:
            k = T * self.steps_per_unit
            if T <= 0 or abs(k - round(k)) > 1e-9 * k:
                raise ConfigurationError(f"steps_per_unit * T must be a positive integer (T={T})")

    def steps(self, T: float) -> int:
        return int(round(T * self.steps_per_unit))

    def width(self, dt: float) -> float:
        return effective_width(self.r, dt) if self.barrier_correction else self.r


@dataclass
class Row:
    experiment: str
    T: float
    parameter: str
    mean: float
    se: float
    median: float
    target: float
    bias: float = math.nan

    @property
    def rel_error(self) -> float:
        if self.target == 0 or not math.isfinite(self.target):
            return math.nan
        return (self.mean - self.target) / self.target


CSV_HEADER = "experiment,T,parameter,mean,se,median,target,rel_error,bias"


def _fmt(x) -> str:
    return f"{x:.17g}" if isinstance(x, float) else str(x)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list[Row]
    # per-replicate values keyed by (T, parameter)
    samples: dict[tuple[float, str], np.ndarray] = field(default_factory=dict)
    metadata: dict[str, str] = field(default_factory=dict)

    def row(self, T: float, parameter: str) -> Row:
        for r in self.rows:
            if r.T == float(T) and r.parameter == parameter:
                return r
        raise KeyError((T, parameter))

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            vals = (r.experiment, r.T, r.parameter, r.mean, r.se, r.median, r.target, r.rel_error, r.bias)
            lines.append(",".join(_fmt(v) for v in vals))
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | os.PathLike) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{self.config.name}.csv"
        csv_path.write_text(self.to_csv())
        meta = out / f"{self.config.name}.meta.txt"
        meta.write_text("".join(f"{k} = {v}\n" for k, v in self.metadata.items()))
        return csv_path


def worker_count() -> int:
    """Thread count: ``TAUT_BENCH_THREADS`` if set, else the CPU count."""
    cap = os.environ.get("TAUT_BENCH_THREADS")
    if cap:
        try:
            return max(1, int(cap))
        except ValueError:
            raise ConfigurationError(f"TAUT_BENCH_THREADS must be an integer, got {cap!r}") from None
    return os.cpu_count() or 1


def _map_replicates(fn: Callable[[int], object], replicates: int) -> list:
    workers = min(worker_count(), replicates)
    if workers <= 1:
        return [fn(i) for i in range(replicates)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicates)))


def _metadata(cfg: ExperimentConfig, wall: float) -> dict[str, str]:
    import numba
    import scipy

    from . import __version__

    meta = {f"config.{k}": str(v) for k, v in dataclasses.asdict(cfg).items()}
    meta.update({
        "seeds": f"master={cfg.seed} replicates=0..{cfg.replicates - 1}",
        "version.tautstring": __version__,
        "version.numpy": np.__version__,
        "version.scipy": scipy.__version__,
        "version.numba": numba.__version__,
        "version.python": platform.python_version(),
        "wall_time_s": f"{wall:.3f}",
    })
    return meta


def _summarize(values: np.ndarray) -> tuple[float, float, float]:
    values = np.asarray(values, dtype=np.float64)
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return float(np.mean(values)), se, float(np.median(values))


def _with_coarse(cfg: ExperimentConfig, path: SampledPath, fn):
    """``fn`` on the path and, when refinement is on, on the 2x coarser grid."""
    fine = fn(path, cfg.width(path.dt))
    if cfg.refinement and path.n % 2 == 0 and path.n >= 4:
        coarse_path = path.subsample(2)
        coarse = fn(coarse_path, cfg.width(coarse_path.dt))
    else:
        coarse = np.full_like(fine, np.nan)
    return fine, coarse


def _collect(cfg, name, params, targets, per_rep, start):
    rows = []
    samples = {}
    for ti, T in enumerate(cfg.T_list):
        fine = np.array([rep[ti][0] for rep in per_rep])
        coarse = np.array([rep[ti][1] for rep in per_rep])
        for j, (p, target) in enumerate(zip(params, targets)):
            mean, se, med = _summarize(fine[:, j])
            bias = abs(float(np.mean(coarse[:, j] - fine[:, j]))) * _RICHARDSON
            rows.append(Row(name, T, p, mean, se, med, float(target), bias))
            samples[(T, p)] = fine[:, j]
    return ExperimentResult(cfg, rows, samples, _metadata(cfg, time.perf_counter() - start))


def run_energy_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """Normalized energy of the pinned taut string against ``integral phi p_inf``."""
    start = time.perf_counter()
    phis = [parse_phi(d, cfg.r) for d in cfg.phis]
    targets = [integrate_against_p_inf(phi, cfg.r) for phi in phis]
    for phi, t in zip(phis, targets):
        if not math.isfinite(t):
            raise ConfigurationError(
                f"{phi.descriptor} is not integrable against the limit density; use divergence-probe"
            )
    Tmax = cfg.T_list[-1]

    def energies(path, width):
        pl = taut_string(path, TubeSpec(width))
        return np.array([energy(pl, phi) / path.T for phi in phis])

    def one(rep):
        path = simulate_wiener(Tmax, cfg.steps(Tmax), SeedSpec(cfg.seed, rep))
        return [_with_coarse(cfg, path.prefix(cfg.steps(T)), energies) for T in cfg.T_list]

    per_rep = _map_replicates(one, cfg.replicates)
    return _collect(cfg, cfg.name, [p.descriptor for p in phis], targets, per_rep, start)


def run_tv_lln(cfg: ExperimentConfig) -> ExperimentResult:
    """``TV^r / T`` and ``UTV^r / T`` of ``W(t) - mu t`` against ``m_r(mu)`` and ``q_r(mu)``."""
    start = time.perf_counter()
    params, targets = [], []
    for mu in cfg.mu_list:
        params += [f"TV:mu={mu:g}", f"UTV:mu={mu:g}"]
        targets += [m_limit(mu, cfg.r), q_limit(mu, cfg.r)]
    Tmax = cfg.T_list[-1]

    def variations(path, width):
        out = []
        for mu in cfg.mu_list:
            x = add_drift(path, mu)
            out += [tv_trunc(x, width).value / path.T, utv_trunc(x, width).value / path.T]
        return np.array(out)

    def one(rep):
        path = simulate_wiener(Tmax, cfg.steps(Tmax), SeedSpec(cfg.seed, rep))
        return [_with_coarse(cfg, path.prefix(cfg.steps(T)), variations) for T in cfg.T_list]

    per_rep = _map_replicates(one, cfg.replicates)
    return _collect(cfg, cfg.name, params, targets, per_rep, start)


def run_sojourn_convergence(cfg: ExperimentConfig) -> ExperimentResult:
    """KS distance between the derivative's occupation measure and the limit law."""
    start = time.perf_counter()
    Tmax = cfg.T_list[-1]

    def ks(path, width):
        pl = taut_string(path, TubeSpec(width))
        return np.array([ks_distance(sojourn_measure(pl), cfg.r)])

    def one(rep):
        path = simulate_wiener(Tmax, cfg.steps(Tmax), SeedSpec(cfg.seed, rep))
        return [_with_coarse(cfg, path.prefix(cfg.steps(T)), ks) for T in cfg.T_list]

    per_rep = _map_replicates(one, cfg.replicates)
    return _collect(cfg, cfg.name, ["ks"], [0.0], per_rep, start)


def _jensen_scores(path: SampledPath, phi: PhiSpec, r: float, k0: int, max_window: int) -> np.ndarray:
    """Lower bound on ``G(h)/T`` for any pinned tube function ending at each grid time.

    Over a trailing window of ``m`` steps the string must rise by at least
    ``W(T) - W(T - m dt) - r/2``; Jensen turns that into an energy bound.
    """
    w = path.values
    dt = path.dt
    ks = np.arange(k0, path.n + 1)
    best = np.zeros(ks.size)
    for m in np.unique(np.geomspace(1, max_window, 24).astype(np.int64)):
        valid = ks - m >= 0
        rise = np.where(valid, w[ks] - w[np.maximum(ks - m, 0)] - 0.5 * r, 0.0)
        slope = rise / (m * dt)
        with np.errstate(over="ignore"):
            bound = np.where(rise > 0, m * dt * phi_eval(phi, slope), 0.0)
        best = np.maximum(best, bound / (ks * dt))
    return best


def run_divergence_probe(cfg: ExperimentConfig, top_k: int = 8, grid_points: int = 24) -> ExperimentResult:
    """Building blocks of the almost-sure divergence for exponential ``phi``.

    On integer horizons ``N`` in ``[min(T), max(T)]`` the window event is
    ``W(N) - W(N - L) >= r`` with ``L = a / ln N``, ``a = r**2 / 2`` (rounded to
    the grid). Records event counts against ``P(Z >= r / sqrt(L))``, checks the
    Jensen bound ``L phi(r / (2 L))`` on the taut-string energy over every event
    window, and the running maximum of the normalized energy over horizons
    (event horizons, a geometric grid, and the horizons with the largest
    Jensen lower bound).
    """
    start = time.perf_counter()
    phi = parse_phi(cfg.phis[0], cfg.r)
    if phi.kind != "exp" or not phi.params[0] > 1:
        raise ConfigurationError("divergence probe needs phi = exp:lambda with lambda > 1")
    target = integrate_against_p_inf(phi, cfg.r)
    r = cfg.r
    a = 0.5 * r * r
    T_lo, T_hi = cfg.T_list[0], cfg.T_list[-1]
    if T_lo < 3:
        raise ConfigurationError("divergence probe needs horizons of at least 3")
    spu = cfg.steps_per_unit
    n = cfg.steps(T_hi)
    dt = 1.0 / spu
    N = np.arange(math.ceil(T_lo), int(math.floor(T_hi)) + 1)
    kN = N * spu
    mN = np.maximum(1, np.rint(a / np.log(N) / dt).astype(np.int64))
    L = mN * dt
    p_event = stats.norm.sf(r / np.sqrt(L))
    grid_k = np.unique(np.rint(np.geomspace(T_lo, T_hi, grid_points) * spu).astype(np.int64))

    def one(rep):
        path = simulate_wiener(T_hi, n, SeedSpec(cfg.seed, rep))
        w = path.values
        hit = (w[kN] - w[kN - mN]) >= r
        scores = _jensen_scores(path, phi, r, int(grid_k[0]), max(2, int(2.0 / dt)))
        top = np.argsort(scores, kind="stable")[-top_k:] + int(grid_k[0])
        horizons = np.unique(np.concatenate([grid_k, kN[hit], top]))
        norm_energy = np.empty(horizons.size)
        ratios = []
        event_energy = {}
        for i, k in enumerate(horizons):
            pl = taut_string(path.prefix(int(k)), TubeSpec(r))
            norm_energy[i] = energy(pl, phi) / (k * dt)
            event_energy[int(k)] = pl
        for k, m in zip(kN[hit], mN[hit]):
            pl = event_energy[int(k)]
            T = k * dt
            Lw = m * dt
            window = energy(pl, phi, T - Lw, T)
            ratios.append(window / (Lw * float(phi_eval(phi, r / (2.0 * Lw)))))
        running = np.maximum.accumulate(norm_energy)
        return {
            "argmax_T": float(horizons[int(np.argmax(norm_energy))] * dt),
            "events": int(hit.sum()),
            "min_jensen_ratio": min(ratios) if ratios else math.inf,
            "running_max": float(running[-1]),
            "monotone": bool(np.all(np.diff(running) >= 0)),
            "score_max": float(scores.max()),
        }

    reps = _map_replicates(one, cfg.replicates)
    events = np.array([x["events"] for x in reps], dtype=float)
    expected = float(p_event.sum())
    binom_sd = math.sqrt(float(np.sum(p_event * (1 - p_event))))
    ratios = np.array([x["min_jensen_ratio"] for x in reps])
    running = np.array([x["running_max"] for x in reps])
    exceed = (running > 10.0 * target).astype(float)
    rows = [
        Row(cfg.name, T_hi, "window_events", *_summarize(events), expected, binom_sd),
        Row(cfg.name, T_hi, "min_jensen_ratio", float(np.min(ratios)), math.nan, float(np.median(ratios)), 1.0),
        Row(cfg.name, T_hi, "running_max", *_summarize(running), target),
        Row(cfg.name, T_hi, "exceeds_10x", *_summarize(exceed), 10.0 * target),
    ]
    samples = {
        (T_hi, "window_events"): events,
        (T_hi, "min_jensen_ratio"): ratios,
        (T_hi, "running_max"): running,
        (T_hi, "monotone"): np.array([x["monotone"] for x in reps]),
        (T_hi, "argmax_T"): np.array([x["argmax_T"] for x in reps]),
    }
    meta = _metadata(cfg, time.perf_counter() - start)
    meta["window_events.total"] = str(int(events.sum()))
    meta["window_events.expected_total"] = f"{expected * cfg.replicates:.6g}"
    meta["running_max.median_argmax_T"] = f"{np.median(samples[(T_hi, 'argmax_T')]):.6g}"
    meta["window_events.sd_total"] = f"{binom_sd * math.sqrt(cfg.replicates):.6g}"
    return ExperimentResult(cfg, rows, samples, meta)


RUNNERS = {
    "energy-convergence": run_energy_convergence,
    "tv-lln": run_tv_lln,
    "sojourn-convergence": run_sojourn_convergence,
    "divergence-probe": run_divergence_probe,
}


def run(cfg: ExperimentConfig) -> ExperimentResult:
    result = RUNNERS[cfg.name](cfg)
    if cfg.out_dir:
        result.write(cfg.out_dir)
    return result


# -- flat "key = value" configuration files ---------------------------------

_LIST_KEYS = {"T": "T_list", "mu": "mu_list"}


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip()] = value.strip()
    return out


def _truthy(s: str) -> bool:
    return s.strip().lower() in ("1", "true", "yes", "on")


def config_from_mapping(name: str, values: dict[str, str]) -> ExperimentConfig:
    """Build a config from string values (config-file keys or CLI flags)."""
    kw = {}
    for key, raw in values.items():
        if raw is None:
            continue
        if key in _LIST_KEYS:
            kw[_LIST_KEYS[key]] = tuple(float(x) for x in str(raw).split(",") if x.strip())
        elif key == "phi":
            kw["phis"] = tuple(x.strip() for x in str(raw).split(";") if x.strip())
        elif key == "r":
            kw["r"] = float(raw)
        elif key == "steps":
            kw["steps_per_unit"] = int(raw)
        elif key == "replicates":
            kw["replicates"] = int(raw)
        elif key == "seed":
            kw["seed"] = int(raw)
        elif key == "out":
            kw["out_dir"] = str(raw)
        elif key in ("barrier_correction", "refinement"):
            kw[key] = _truthy(str(raw))
        elif key == "name":
            continue
        else:
            raise ConfigurationError(f"unknown configuration key {key!r}")
    try:
        return ExperimentConfig(name=name, **kw)
    except InvalidParameterError as exc:
        raise ConfigurationError(str(exc)) from exc
