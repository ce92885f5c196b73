import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from freelevy.errors import DomainError, HypothesisError
from freelevy.free_small_time import (FreeLimitTable, exact_boolean_stable_power_density, free_power_density,
                                      free_power_density_values, log_cauchy_free_limit_check,
                                      log_cauchy_free_parameters, tucci_convergence_check, tucci_limit,
                                      write_summary_json)
from freelevy.laws import AdmissiblePair, BooleanStable, MarchenkoPastur, MuAlphaBeta, PointMass


def test_time_one_reproduces_mp():
    mp = MarchenkoPastur()
    x = np.linspace(0.2, 3.8, 10)
    assert np.allclose(free_power_density_values(mp, 1.0, 1.0, x), mp.density(x), rtol=2e-5)


@settings(deadline=None, max_examples=12)
@given(st.floats(0.2, 0.8), st.floats(0.3, 4.0), st.floats(0.5, 3.0))
def test_boolean_stable_power_two_routes(alpha, t, p):
    # numeric subordination route against the closed-form b_{alpha'} route
    law = BooleanStable(AdmissiblePair(alpha, 1.0))
    x = np.linspace(0.3, 3.0, 7)
    num = free_power_density_values(law, t, p, x)
    exact = exact_boolean_stable_power_density(alpha, t, p, x)
    assert np.allclose(num, exact, rtol=1e-5, atol=1e-8)


def test_mp_half_power_has_unit_mass():
    f = lambda v: free_power_density_values(MarchenkoPastur(), 0.5, 1.0, np.array([v]))[0]
    mass = sum(integrate.quad(f, a, b, limit=200)[0] for a, b in [(1e-12, 1e-3), (1e-3, 1.0), (1.0, 10.0)])
    assert mass == pytest.approx(1.0, abs=1e-5)


def test_grid_wrapper():
    d = free_power_density(MarchenkoPastur(), 1.0, 1.0, (0.5, 3.5), grid_size=31, log_grid=True)
    assert d.grid[0] == pytest.approx(0.5) and d.grid.size == 31
    with pytest.raises(DomainError):
        free_power_density(MarchenkoPastur(), 1.0, 1.0, (0.0, 3.5))
    with pytest.raises(DomainError):
        free_power_density_values(MarchenkoPastur(), 0.0, 1.0, [1.0])


def test_log_cauchy_parameters_need_boundary_value():
    # v = a Log(-z) + (b - a) Log(1 - z) is a i pi at 1 when a = b
    beta, gamma = log_cauchy_free_parameters(MuAlphaBeta(0.3, 0.3))
    assert beta == pytest.approx(0.0, abs=1e-8)
    assert gamma == pytest.approx(0.3 * np.pi, rel=1e-10)
    with pytest.raises(HypothesisError):
        log_cauchy_free_parameters(MarchenkoPastur())


def test_log_cauchy_free_limit_shrinks():
    table = log_cauchy_free_limit_check(MuAlphaBeta(0.3, 0.3), [0.1, 0.01, 0.001], (0.5, 2.0))
    assert table.decreasing
    assert table.distance[-1] < 1e-3


def test_tucci_limit_of_mp_is_uniform():
    # 1/S(x - 1) = x, so the quantile function is the identity
    lim = tucci_limit(MarchenkoPastur())
    assert np.allclose(lim.quantile_y, lim.quantile_x, rtol=1e-14)
    assert np.allclose(lim.density.values, 1.0, atol=2e-3)
    assert lim.cdf(0.25) == pytest.approx(0.25)


def test_tucci_limit_of_point_mass_is_atom():
    lim = tucci_limit(PointMass(2.0))
    assert lim.density is None
    assert lim.atom.locations[0] == pytest.approx(2.0)
    with pytest.raises(DomainError):
        tucci_limit(PointMass(2.0), atom_at_zero=1.0)


def test_tucci_convergence_on_mp():
    table = tucci_convergence_check(MarchenkoPastur(), [4.0, 16.0], K=(0.1, 0.9), grid_size=64)
    assert table.decreasing


def test_summary_json(tmp_path):
    path = tmp_path / "s.json"
    write_summary_json({"a": FreeLimitTable((1.0,), (0.5,), {"K": [0, 1]}), "b": 3}, path)
    data = json.loads(path.read_text())
    assert data["a"]["sup_distance"] == [0.5] and data["b"] == 3
