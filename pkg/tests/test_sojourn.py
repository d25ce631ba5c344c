import io
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import optimize

from oracles import tail_mp
from tautstring import (
    InvalidParameterError,
    PhiSpec,
    PiecewiseLinearPath,
    SeedSpec,
    SojournMeasure,
    TubeSpec,
    empirical_tail,
    ks_distance,
    limit_tail,
    merge_measures,
    normalized_energy,
    p_infinity,
    simulate_wiener,
    sojourn_measure,
    taut_string,
)
from tautstring.sojourn import tail_comparison_csv

seeds = st.integers(0, 2**32)


def pl_of(times, values):
    return PiecewiseLinearPath(np.asarray(times, float), np.asarray(values, float))


def string(seed, T=50.0, r=1.0):
    return taut_string(simulate_wiener(T, int(T * 200), SeedSpec(seed)), TubeSpec(r))


def test_single_line():
    m = sojourn_measure(pl_of([0, 4], [0, 8]))
    np.testing.assert_array_equal(m.slopes, [2.0])
    np.testing.assert_array_equal(m.weights, [4.0])


def test_two_segments():
    m = sojourn_measure(pl_of([0, 1, 2], [0, 3, 0]))
    np.testing.assert_array_equal(m.slopes, [-3.0, 3.0])
    np.testing.assert_array_equal(m.weights, [1.0, 1.0])


def test_equal_slopes_merge():
    m = sojourn_measure(pl_of([0, 1, 2, 4], [0, 1, 0, 2]))
    np.testing.assert_array_equal(m.slopes, [-1.0, 1.0])
    np.testing.assert_array_equal(m.weights, [1.0, 3.0])


@given(seeds)
def test_weights_and_moments(seed):
    pl = string(seed % 1000)
    m = sojourn_measure(pl)
    assert m.weights.sum() == pytest.approx(m.T, rel=1e-9)
    assert np.all(np.diff(m.slopes) > 0)
    assert m.integrate(lambda u: u**2) == pytest.approx(normalized_energy(pl, PhiSpec.power(2)), rel=1e-12)
    assert m.integrate(lambda u: u) == pytest.approx((pl.values[-1] - pl.values[0]) / pl.T, abs=1e-12)


def test_mean_slope_of_pinned_string_is_endpoint_average():
    p = simulate_wiener(40.0, 8000, SeedSpec(5))
    m = sojourn_measure(taut_string(p, TubeSpec(1.0)))
    assert m.integrate(lambda u: u) == pytest.approx(p.values[-1] / p.T, abs=1e-12)


def test_empirical_tail_conventions():
    m = sojourn_measure(pl_of([0, 1, 3], [0, -1, 3]))
    assert empirical_tail(m, -5.0) == 1.0
    assert empirical_tail(m, 5.0) == 0.0
    assert empirical_tail(m, 2.0) == pytest.approx(2 / 3)
    assert empirical_tail(m, 2.0 + 1e-12) == 0.0
    single = sojourn_measure(pl_of([0, 2], [0, 1]))
    assert empirical_tail(single, 0.5) == 1.0


def test_merge_pools_time():
    a = sojourn_measure(pl_of([0, 1], [0, 1]))
    b = sojourn_measure(pl_of([0, 3], [0, -3]))
    m = merge_measures([a, b])
    assert m.T == 4.0
    np.testing.assert_array_equal(m.slopes, [-1.0, 1.0])
    np.testing.assert_array_equal(m.weights, [3.0, 1.0])
    with pytest.raises(InvalidParameterError):
        merge_measures([])


def test_merge_is_associative():
    ms = [sojourn_measure(string(s, T=10.0)) for s in range(3)]
    left = merge_measures([merge_measures(ms[:2]), ms[2]])
    right = merge_measures([ms[0], merge_measures(ms[1:])])
    np.testing.assert_array_equal(left.slopes, right.slopes)
    np.testing.assert_allclose(left.weights, right.weights, rtol=1e-15)


def test_limit_tail_values():
    assert limit_tail(0.0, 1.0) == 0.5
    assert limit_tail(60.0, 1.0) < 1e-40
    assert limit_tail(1e6, 1.0) == 0.0
    assert limit_tail(-1e6, 1.0) == 1.0
    assert limit_tail(1.0, 1.0) == pytest.approx(float(tail_mp(1, 1)), abs=1e-9)
    with pytest.raises(InvalidParameterError):
        limit_tail(0.0, 0.0)


@given(st.floats(-8, 8), st.sampled_from([0.5, 1.0, 2.0]))
def test_limit_tail_against_quadrature(v, r):
    ref = float(tail_mp(v, r)) if v >= 0 else 1 - float(tail_mp(-v, r))
    assert limit_tail(v, r) == pytest.approx(ref, abs=1e-14)


def test_limit_tail_shape():
    v = np.linspace(-6, 6, 2001)
    t = limit_tail(v, 1.0)
    assert np.all((t >= 0) & (t <= 1))
    assert np.all(np.diff(t) <= 0)
    h = 1e-5
    for x in (-2.0, -0.3, 0.0, 0.4, 1.5):
        deriv = (limit_tail(x - h, 1.0) - limit_tail(x + h, 1.0)) / (2 * h)
        assert deriv == pytest.approx(p_infinity(x, 1.0), abs=1e-8)


def test_point_mass_at_zero():
    m = SojournMeasure(np.array([0.0]), np.array([1.0]), 1.0)
    assert ks_distance(m, 1.0) == pytest.approx(0.5)


def sample_limit(count, r, rng):
    u = rng.uniform(size=count)
    return np.array([optimize.brentq(lambda v: limit_tail(v, r) - q, -60 / r, 60 / r, xtol=1e-14) for q in u])


@pytest.mark.parametrize("r", [0.5, 1.0])
def test_ks_of_exact_samples(r):
    rng = np.random.default_rng(17)
    n = 2000
    x = np.sort(sample_limit(n, r, rng))
    m = SojournMeasure(x, np.ones(n), float(n))
    # Dvoretzky-Kiefer-Wolfowitz: P(D > eps) <= 2 exp(-2 n eps^2); eps at 4 sigma-like level
    eps = math.sqrt(math.log(2 / 1e-4) / (2 * n))
    assert ks_distance(m, r) < eps


def test_long_string_close_to_limit():
    ks = [ks_distance(sojourn_measure(string(s, T=400.0)), 1.0) for s in range(5)]
    assert np.median(ks) < 0.1


def test_csv_exports():
    m = sojourn_measure(pl_of([0, 1, 3], [0, -1, 3]))
    buf = io.StringIO()
    m.to_csv(buf)
    assert buf.getvalue() == "slope,weight\n-1,1\n2,2\n"
    buf = io.StringIO()
    tail_comparison_csv(m, 1.0, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "v,empirical,limit"
    v, emp, lim = map(float, lines[2].split(","))
    assert (v, emp) == (2.0, pytest.approx(2 / 3))
    assert lim == limit_tail(2.0, 1.0)


@pytest.mark.parametrize("seed", range(4))
def test_width_scaling_pair(seed):
    # 2 W(t/4) is a Wiener path: (r=1, [0,T]) and (r=2, [0,4T]) on the same draws
    from tautstring.wiener import effective_width

    T, n = 100.0, 50_000
    small = simulate_wiener(T, n, SeedSpec(31, seed))
    big = simulate_wiener(4 * T, n, SeedSpec(31, seed))
    np.testing.assert_allclose(big.values, 2 * small.values, rtol=1e-13, atol=1e-13)
    ks1 = ks_distance(sojourn_measure(taut_string(small, TubeSpec(effective_width(1.0, small.dt)))), 1.0)
    ks2 = ks_distance(sojourn_measure(taut_string(big, TubeSpec(effective_width(2.0, big.dt)))), 2.0)
    assert ks2 == pytest.approx(ks1, abs=1e-9)
