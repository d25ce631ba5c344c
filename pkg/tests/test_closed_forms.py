import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import m_mp, p_inf_mp, q_mp
from tautstring import (
    InvalidParameterError,
    PhiSpec,
    density_from_q,
    integrate_against_p_inf,
    m_limit,
    p_infinity,
    q_limit,
)

widths = st.floats(0.05, 20.0)
points = st.floats(-30.0, 30.0)


def test_density_at_zero():
    assert p_infinity(0.0, 1.0) == pytest.approx(1 / 3, rel=1e-15)
    assert p_infinity(0.0, 2.5) == pytest.approx(2.5 / 3, rel=1e-15)


def test_density_at_one_high_precision():
    assert p_infinity(1.0, 1.0) == pytest.approx(float(p_inf_mp(1, 1)), rel=1e-14)
    # the closed form evaluates to 0.2266568..., not 0.22655
    assert p_infinity(1.0, 1.0) == pytest.approx(0.2266568, abs=1e-7)


@given(points, widths)
def test_density_matches_arbitrary_precision(u, r):
    ref = float(p_inf_mp(u, r))
    assert p_infinity(u, r) == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(points, widths)
def test_density_even_and_positive(u, r):
    assert p_infinity(u, r) == p_infinity(-u, r)
    if abs(u * r) < 300:
        assert p_infinity(u, r) > 0


@pytest.mark.parametrize("x", [0.0, 1e-8, 5e-5, 9.99e-5, 1.01e-4, 1e-3])
def test_series_branch_is_continuous(x):
    assert p_infinity(x, 1.0) == pytest.approx(float(p_inf_mp(x, 1)), rel=1e-13)


def test_series_coefficient():
    # r (1/3 - 2 x^2 / 15) near zero
    x = mp.mpf("1e-3")
    exact = p_inf_mp(x, 1)
    assert float((mp.mpf(1) / 3 - exact) / x**2) == pytest.approx(2 / 15, rel=1e-5)


@given(points, widths)
def test_width_scaling(u, r):
    assert p_infinity(u, r) == pytest.approx(r * p_infinity(r * u, 1.0), rel=1e-12, abs=1e-300)


def test_exponential_tail():
    # p e^{2u} / (4u) = (1 - 1/u) coth-corrections -> 1
    ratio = [p_infinity(u, 1.0) * math.exp(2 * u) / (4 * u) for u in (5.0, 10.0, 20.0, 40.0)]
    assert np.all(np.diff(ratio) > 0)
    assert ratio[2] * 20 / 19 == pytest.approx(1.0, abs=1e-3)
    assert ratio[-1] == pytest.approx(1 - 1 / 40, rel=1e-12)


def test_vectorised():
    u = np.linspace(-3, 3, 7)
    out = p_infinity(u, 1.0)
    assert out.shape == (7,)
    np.testing.assert_allclose(out, [p_infinity(float(x), 1.0) for x in u], rtol=1e-15)


def test_width_validation():
    for fn in (p_infinity, m_limit, q_limit):
        with pytest.raises(InvalidParameterError):
            fn(0.0, 0.0)
        with pytest.raises(InvalidParameterError):
            fn(0.0, -1.0)


def test_limit_values():
    assert m_limit(0.0, 2.0) == 0.5
    assert q_limit(0.0, 1.0) == 0.5
    assert m_limit(1.0, 1.0) == pytest.approx(float(mp.coth(1)), rel=1e-15)
    assert m_limit(1.0, 1.0) == pytest.approx(1.31304, abs=1e-5)
    assert q_limit(1.0, 1.0) == pytest.approx(float((mp.coth(1) - 1) / 2), rel=1e-14)
    assert q_limit(1.0, 1.0) == pytest.approx(0.15652, abs=1e-5)


@given(points, widths)
def test_limits_match_arbitrary_precision(mu, r):
    assert m_limit(mu, r) == pytest.approx(float(m_mp(mu, r)), rel=1e-13)
    assert q_limit(mu, r) == pytest.approx(float(q_mp(mu, r)), rel=1e-11, abs=1e-300)


@given(points, widths)
def test_limit_identities(mu, r):
    assert m_limit(mu, r) == m_limit(-mu, r)
    assert q_limit(mu, r) - q_limit(-mu, r) == pytest.approx(-mu, abs=1e-12 * max(1, abs(mu)))
    m = m_limit(mu, r)
    assert q_limit(mu, r) + q_limit(-mu, r) == pytest.approx(m, rel=1e-14)


def test_quadratic_integral():
    for r in (0.5, 1.0, 2.0):
        assert integrate_against_p_inf(PhiSpec.power(2), r) == pytest.approx(math.pi**2 / (6 * r * r), rel=1e-10)
    assert integrate_against_p_inf(PhiSpec.power(2), 2.0) == pytest.approx(0.4112, abs=1e-4)


def test_normalisation():
    one = PhiSpec.linear(0.0, 1.0)
    for r in (0.3, 1.0, 4.0):
        assert integrate_against_p_inf(one, r) == pytest.approx(1.0, abs=1e-10)
    assert float(mp.quad(lambda u: p_inf_mp(u, 1), [-mp.inf, 0, mp.inf])) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("mu", [-2.0, -0.5, 0.0, 0.3, 1.0, 3.0])
@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_shifted_parts_integrate_to_q(mu, r):
    assert integrate_against_p_inf(PhiSpec.rho_plus(mu), r) == pytest.approx(q_limit(mu, r), abs=1e-8)
    assert integrate_against_p_inf(PhiSpec.rho_minus(mu), r) == pytest.approx(q_limit(-mu, r), abs=1e-8)
    assert integrate_against_p_inf(PhiSpec.kappa(mu), r) == pytest.approx(m_limit(mu, r), abs=1e-8)


def test_identity_integrates_to_zero():
    assert integrate_against_p_inf(PhiSpec.linear(1.0, 0.0), 1.0) == 0.0


def test_graph_length_against_arbitrary_precision():
    ref = mp.quad(lambda u: mp.sqrt(1 + u * u) * p_inf_mp(u, 1), [-mp.inf, 0, mp.inf])
    assert integrate_against_p_inf(PhiSpec.graph_length(), 1.0) == pytest.approx(float(ref), rel=1e-10)


def test_exponential_integrals():
    ref = mp.quad(lambda u: mp.exp(mp.mpf(1.5) * u) * p_inf_mp(u, 1), [-mp.inf, 0, mp.inf])
    val = integrate_against_p_inf(PhiSpec.exponential(1.5, 1.0), 1.0)
    assert val == pytest.approx(float(ref), rel=1e-10)
    assert val == pytest.approx(11.1033, abs=1e-4)
    assert integrate_against_p_inf(PhiSpec.exponential(2.0, 1.0), 1.0) == math.inf
    assert integrate_against_p_inf(PhiSpec.exponential(1.0, 3.0), 1.0) == math.inf
    assert math.isfinite(integrate_against_p_inf(PhiSpec.exponential(1.9, 1.0), 1.0))


def test_power_one_integral():
    ref = mp.quad(lambda u: abs(u) * p_inf_mp(u, 1), [-mp.inf, 0, mp.inf])
    assert integrate_against_p_inf(PhiSpec.power(1), 1.0) == pytest.approx(float(ref), rel=1e-10)


def test_second_difference_recovers_density():
    assert density_from_q(1.0, 1.0, 1e-4) == pytest.approx(p_infinity(1.0, 1.0), abs=1e-6)
    assert density_from_q(0.0, 1.0, 1e-4) == pytest.approx(1 / 3, abs=1e-6)
    for r in (0.5, 1.0, 2.0):
        grid = np.linspace(-5 / r, 5 / r, 101)
        err = [abs(density_from_q(mu, r, 1e-3) - p_infinity(mu, r)) for mu in grid]
        assert max(err) < 1e-6


@given(st.floats(0.0, 10.0), widths)
def test_second_difference_even(mu, r):
    assert density_from_q(mu, r) == pytest.approx(density_from_q(-mu, r), abs=1e-10)


def test_second_difference_step_validation():
    for h in (0.0, -1e-4, 2e-3):
        with pytest.raises(InvalidParameterError):
            density_from_q(0.0, 1.0, h)
