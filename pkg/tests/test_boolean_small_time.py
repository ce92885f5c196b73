import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from freelevy.boolean_small_time import (BooleanPowerDensityRequest, LimitTable, additive_boolean_power_F,
                                         additive_boolean_power_density, boolean_power_cauchy,
                                         boolean_power_density, boolean_power_eta, log_boolean_stable_limit_check,
                                         log_cauchy_limit_check, log_cauchy_parameters, write_distance_csv)
from freelevy.boolean_small_time import _density_values
from freelevy.errors import DomainError, HypothesisError
from freelevy.laws import AdmissiblePair, BooleanStable, MarchenkoPastur, PointMass, TwoPoint
from freelevy.measures import eta_transform


def density_at(mu, t, x):
    # pointwise values; a grid request would reject zero-mass windows
    return _density_values(mu, t, 1.0, np.array([x]))[0]


def test_power_one_is_identity():
    mu = MarchenkoPastur()
    z = np.array([1.0 + 1.0j, -2.0 + 0.1j, 5.0 - 0.3j])
    assert np.allclose(boolean_power_cauchy(mu, 1.0, z), mu.cauchy(z), rtol=1e-13)
    grid = boolean_power_density(BooleanPowerDensityRequest(mu, 1.0, 1.0, (0.2, 3.8), grid_size=7))
    assert np.allclose(grid.values, mu.density(grid.grid), rtol=1e-10)


def test_power_zero_is_point_mass_at_one():
    z = 2.0 + 1.0j
    assert boolean_power_cauchy(MarchenkoPastur(), 0.0, z) == pytest.approx(1.0 / (z - 1.0))


@settings(deadline=None, max_examples=30)
@given(st.floats(0.05, 1.0), st.floats(-50.0, -0.01))
def test_eta_of_power_on_negative_axis(t, x):
    # eta_t(x) = x (eta(x) / x)^t, real and positive ratio on (-inf, 0)
    mu = MarchenkoPastur()
    ratio = eta_transform(mu, x + 0j).real / x
    assert boolean_power_eta(mu, t, x + 0j) == pytest.approx(x * ratio ** t, rel=1e-11)


def test_mp_power_half_density_has_unit_mass():
    f = lambda x: density_at(MarchenkoPastur(), 0.5, x)
    mass = sum(integrate.quad(f, a, b, limit=400)[0] for a, b in [(1e-9, 1), (1, 4), (4, 50), (50, np.inf)])
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_two_point_power_atoms_plus_density_is_one():
    # (delta_2 + delta_0.5)/2 to the Boolean power 1/2: two atoms where
    # x = (x - F(x))^(1/2) plus a density on (0.8, 1.25)
    mu = TwoPoint(2.0, 0.5)

    def F(x):
        return 1.0 / (0.5 / (x - 2.0) + 0.5 / (x - 0.5))

    def den(x):
        return x - (x - F(x)) ** 0.5

    atoms = 0.0
    for a, b in [(0.55, 0.75), (1.3, 1.9)]:
        r = optimize.brentq(den, a, b, xtol=1e-15)
        h = 1e-6
        atoms += 2.0 * h / (den(r + h) - den(r - h))
    ac = integrate.quad(lambda x: density_at(mu, 0.5, x), 0.8, 1.25, limit=400)[0]
    assert atoms + ac == pytest.approx(1.0, abs=1e-8)


def test_request_validation():
    mu = MarchenkoPastur()
    with pytest.raises(DomainError):
        BooleanPowerDensityRequest(mu, 1.5, 1.0, (0.1, 1.0))
    with pytest.raises(DomainError):
        BooleanPowerDensityRequest(mu, 0.5, 0.0, (0.1, 1.0))
    with pytest.raises(DomainError):
        BooleanPowerDensityRequest(mu, 0.5, 1.0, (0.0, 1.0))
    with pytest.raises(DomainError):
        BooleanPowerDensityRequest(mu, 0.5, 1.0, (0.1, 1.0), grid_size=1)


def test_log_cauchy_parameters_and_hypothesis():
    beta, gamma = log_cauchy_parameters(MarchenkoPastur())
    # F(1 + i0) = (1 + i sqrt 3)/2, so 1 - F = exp(-i pi/3)
    assert beta == pytest.approx(0.0, abs=1e-12)
    assert gamma == pytest.approx(np.pi / 3.0, rel=1e-12)
    # F(z) = z - a gives F(1) = 1 - a, real and below 1 for every a > 0
    for a in (0.5, 2.0):
        with pytest.raises(HypothesisError):
            log_cauchy_parameters(PointMass(a))


def test_log_cauchy_limit_distances_shrink(tmp_path):
    table = log_cauchy_limit_check(MarchenkoPastur(), [0.1, 0.01, 0.001], (0.5, 2.0))
    assert table.decreasing
    assert table.distance[-1] < 1e-2
    write_distance_csv(table, tmp_path / "d.csv")
    assert (tmp_path / "d.csv").read_text().splitlines()[0] == "t,sup_distance"


def test_log_boolean_stable_limit_distances_shrink():
    table = log_boolean_stable_limit_check(0.5, (1.2, 3.0), (0.3, 0.8), [1e-1, 1e-2, 1e-3])
    assert table.decreasing
    with pytest.raises(DomainError):
        log_boolean_stable_limit_check(0.5, (0.9, 3.0), (0.3, 0.8), [0.1])


def test_limit_table_decreasing_flag():
    assert LimitTable((1.0, 0.1), (0.5, 0.1), {}).decreasing
    assert not LimitTable((1.0, 0.1), (0.1, 0.5), {}).decreasing


@settings(deadline=None, max_examples=30)
@given(st.floats(0.2, 0.95), st.floats(0.0, 1.0), st.floats(0.05, 4.0))
def test_boolean_stable_is_strictly_stable(alpha, rho, t):
    base = BooleanStable(AdmissiblePair(alpha, rho), 1.0)
    scaled = BooleanStable(AdmissiblePair(alpha, rho), t)
    z = np.array([1.0 + 1.0j, -0.5 + 2.0j, 3.0 - 0.2j])
    assert np.allclose(additive_boolean_power_F(base, t, z), scaled.F(z), rtol=1e-12)
    x = np.array([-1.3, 0.7])
    if 0.0 < rho < 1.0:
        assert np.allclose(additive_boolean_power_density(base, t, x), scaled.density(x), rtol=1e-10)
