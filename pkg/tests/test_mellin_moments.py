import csv
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freelevy import specfun
from freelevy.errors import DivergenceError, DomainError
from freelevy.laws import AdmissiblePair, BooleanStable, MarchenkoPastur, PointMass, Semicircle
from freelevy.mellin_moments import (MomentTable, as5_term_bound, free_bessel_moment_closed_form,
                                     free_bessel_moment_s1, free_bessel_table, hm_mellin, laplace_free_stable,
                                     multi_law_series, multi_law_series_result, nu_alpha_series,
                                     nu_alpha_series_result, nu_alpha_table, write_moment_csv)


def mp_mellin_oracle(g):
    return float(mpmath.gamma(2 * g + 1) / (mpmath.gamma(g + 1) * mpmath.gamma(g + 2)))


def bessel_oracle(r, s, g, t):
    mpmath.mp.dps = 30
    xi = mpmath.mpf(1) / t
    b = g * xi + g * (r - 1) + 1
    c = g * (r - 1) + 2
    val = (mpmath.mpf(t) ** (r * g) * mpmath.mpf(s - 1) ** g * mpmath.gamma(b)
           / (mpmath.gamma(c) * mpmath.gamma(g * xi + 1)) * mpmath.hyp2f1(-g, b, c, -1 / mpmath.mpf(s - 1)))
    return float(val)


@settings(deadline=None, max_examples=20)
@given(st.floats(-0.45, 0.95).filter(lambda g: abs(g) > 1e-3))
def test_hm_mellin_mp(g):
    assert hm_mellin(MarchenkoPastur(), g) == pytest.approx(mp_mellin_oracle(g), rel=1e-9)


@settings(deadline=None, max_examples=15)
@given(st.floats(-0.6, 0.6).filter(lambda g: abs(g) > 1e-3))
def test_hm_mellin_positive_boolean_stable(g):
    law = BooleanStable(AdmissiblePair(0.7, 1.0))
    assert hm_mellin(law, g) == pytest.approx(law.mellin(g), rel=1e-8)


def test_hm_mellin_point_mass_and_errors():
    assert hm_mellin(PointMass(2.0), 0.5) == pytest.approx(math.sqrt(2.0), rel=1e-12)
    with pytest.raises(DivergenceError):
        hm_mellin(MarchenkoPastur(), -0.5)
    with pytest.raises(DomainError):
        hm_mellin(MarchenkoPastur(), 0.0)


@settings(deadline=None, max_examples=25)
@given(st.floats(1.0, 3.0), st.floats(1.05, 5.0), st.floats(0.1, 3.0), st.floats(0.05, 2.0))
def test_free_bessel_closed_form_against_mpmath(r, s, g, t):
    assert free_bessel_moment_closed_form(r, s, g, t) == pytest.approx(bessel_oracle(r, s, g, t), rel=1e-9)


@pytest.mark.parametrize("g", [1.0, 2.0, 0.5, 1.7])
def test_free_bessel_continuous_at_s_one(g):
    near = free_bessel_moment_closed_form(1.5, 1.0 + 1e-9, g, 0.3)
    assert near == pytest.approx(free_bessel_moment_s1(1.5, g, 0.3), rel=1e-6)


def test_free_bessel_small_t_table_approaches_dh():
    tab = free_bessel_table(1.0, 1.0, 1e-4, [0.5, 1.0, 2.0])
    assert max(tab.rel_err) < 1e-3
    with pytest.raises(DomainError):
        free_bessel_moment_closed_form(0.5, 2.0, 1.0, 1.0)


def test_nu_alpha_series_terms_match_direct_sum():
    alpha, g, t = 1.5, 0.8, 0.2
    xi = t ** (-1.0 / alpha)
    x = g * xi
    n_max = as5_term_bound(alpha, g, t, xi)
    mpmath.mp.dps = 30
    direct = mpmath.fsum((x * t) ** n / mpmath.factorial(n) * mpmath.gamma(1 + n * (alpha - 1) + x)
                         / (mpmath.gamma(1 + x) * mpmath.gamma(2 + n * (alpha - 1))) for n in range(n_max + 1))
    res = nu_alpha_series_result(alpha, g, t, xi)
    assert res.value == pytest.approx(float(direct), rel=1e-12)
    assert res.tail_bound <= 1e-12 * res.value


def test_laplace_alpha_two_is_semicircle():
    # sum g^(2n)/((n+1)! n!) = I_1(2g)/g
    for g in (0.3, 1.0, 2.5):
        assert laplace_free_stable(2.0, g) == pytest.approx(Semicircle().laplace(g), rel=1e-11)
        assert laplace_free_stable(2.0, g) == pytest.approx(specfun.bessel_i1(2 * g) / g, rel=1e-12)
    assert laplace_free_stable(1.5, 0.0) == 1.0


def test_nu_alpha_table_small_t():
    tab = nu_alpha_table(2.0, 1e-6, [0.5, 1.0])
    assert max(tab.rel_err) < 1e-2


def test_multi_law_single_index_is_nu_alpha():
    assert multi_law_series([1.7], [1.0], 0.6, 0.1, 3.0) == nu_alpha_series(1.7, 0.6, 0.1, 3.0)


def test_multi_law_frozen_value():
    # independent mpmath double sum at 30 digits
    val = multi_law_series([2.0, 1.5], [1.0, 1.0], 1.0, 1e-6, 1e3)
    assert val == pytest.approx(1.62658154971593809, rel=1e-11)


def test_multi_law_validation_and_tail():
    with pytest.raises(DomainError):
        multi_law_series([1.5, 2.0], [1.0, 1.0], 1.0, 0.1, 1.0)
    with pytest.raises(DomainError):
        multi_law_series([2.0, 1.8, 1.5, 1.2], [1.0] * 4, 1.0, 0.1, 1.0)
    res = multi_law_series_result([2.0, 1.8, 1.4], [0.5, 1.0, 2.0], 0.7, 0.3, 1.5)
    assert res.tail_bound < 1e-12 * res.value


def test_moment_table_and_csv(tmp_path):
    with pytest.raises(DomainError):
        MomentTable((1.0,), 0.1, (1.0, 2.0), (1.0,))
    tab = MomentTable((1.0, 2.0), 0.1, (0.5, 0.7), (0.5, 0.5))
    assert tab.abs_err == pytest.approx((0.0, 0.2))
    path = tmp_path / "m.csv"
    write_moment_csv(tab, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["gamma", "t", "value", "limit", "abs_err"] and len(rows) == 3
