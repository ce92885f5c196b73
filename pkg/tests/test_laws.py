import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, optimize

from freelevy.errors import DivergenceError, DomainError, NotInfinitelyDivisibleError
from freelevy.laws import (AdmissiblePair, BooleanStable, Cauchy, CuspLaw, DykemaHaagerup, FreeBessel,
                           MarchenkoPastur, PointMass, Semicircle, TwoPoint, boolean_stable_boxtimes_power,
                           boolean_stable_density, dh_grid, dh_mellin, dh_moment, free_stable_f1_grid,
                           free_stable_voiculescu, log_cauchy_density, s_transform_inverse_law,
                           s_transform_of, sigma_transform_of, v_function_of)


@st.composite
def admissible(draw):
    a = draw(st.floats(0.2, 2.0))
    if a <= 1.0:
        r = draw(st.floats(0.0, 1.0))
    else:
        r = draw(st.floats(1.0 - 1.0 / a, 1.0 / a))
    return a, r


@st.composite
def interior_pair(draw):
    # at rho = 1 - 1/alpha (alpha > 1) F vanishes at -1 and the law has an atom
    a = draw(st.floats(0.2, 1.95))
    if a <= 1.0:
        return a, draw(st.floats(0.0, 1.0))
    lo, hi = 1.0 - 1.0 / a, 1.0 / a
    pad = 0.02 * (hi - lo)
    return a, draw(st.floats(lo + pad, hi - pad))


@given(admissible())
def test_admissible_pairs_construct(pair):
    p = AdmissiblePair(*pair)
    assert 0.0 <= p.theta <= 2.0 * math.pi


def test_boundary_rho_has_atom_at_minus_one():
    law = BooleanStable(AdmissiblePair(1.5, 1.0 - 1.0 / 1.5))
    assert abs(law.F(-1.0 + 0j)) < 1e-14


def test_admissibility_boundaries():
    AdmissiblePair(1.5, 1.0 / 1.5)
    AdmissiblePair(2.0, 0.5)
    with pytest.raises(DomainError, match=r"1-1/alpha"):
        AdmissiblePair(1.5, 0.9)
    with pytest.raises(DomainError):
        AdmissiblePair(0.0, 0.5)
    with pytest.raises(DomainError):
        AdmissiblePair(0.5, 1.2)


@settings(max_examples=25, deadline=None)
@given(interior_pair())
def test_boolean_stable_density_has_unit_mass(pair):
    a, r = pair
    if a == 1.0 and r in (0.0, 1.0):
        return  # point mass at -i r, no density
    f = lambda x: boolean_stable_density(a, r, 1.0, x)
    mass = sum(integrate.quad(f, lo, hi, limit=400)[0] for lo, hi in [(-np.inf, -1), (-1, 0), (0, 1), (1, np.inf)])
    assert mass == pytest.approx(1.0, abs=2e-6)


def test_boolean_density_is_stieltjes_inverse_of_F():
    law = BooleanStable(AdmissiblePair(0.7, 0.4), 1.3)
    x = np.array([-2.0, -0.3, 0.4, 3.0])
    inv = -np.imag(law.boundary_cauchy(x)) / np.pi
    assert np.allclose(inv, law.density(x), rtol=1e-12)


@given(st.floats(-0.85, 0.85))
def test_positive_boolean_mellin_matches_quadrature(g):
    law = BooleanStable(AdmissiblePair(0.9, 1.0), 1.0)
    ref = sum(integrate.quad(lambda x: x ** g * law.density(x), lo, hi, limit=400)[0]
              for lo, hi in [(0, 1), (1, np.inf)])
    assert law.mellin(g) == pytest.approx(ref, rel=1e-6)


def test_boolean_mellin_divergence():
    with pytest.raises(DivergenceError):
        BooleanStable(AdmissiblePair(0.5, 1.0)).mellin(0.5)


def test_dh_moments_exact():
    assert dh_moment(1.0, 0) == 1.0
    assert dh_moment(1.0, 1) == pytest.approx(0.5, rel=1e-15)
    assert dh_moment(1.0, 2) == pytest.approx(2.0 / 3.0, rel=1e-15)
    assert dh_moment(1.0, 3) == pytest.approx(27.0 / 24.0, rel=1e-14)
    assert dh_mellin(1.0, 2.0) == pytest.approx(dh_moment(1.0, 2), rel=1e-14)


@pytest.mark.parametrize("r", [1.0, 0.5, 2.0])
def test_dh_grid_moments(r):
    d = dh_grid(r)
    for n in (1, 2):
        m = np.trapezoid(d.grid ** n * d.values, d.grid)
        assert m == pytest.approx(dh_moment(r, n), rel=2e-3)
    assert DykemaHaagerup(r).support[1] == pytest.approx(r ** -r * math.e ** r)


def test_f1_grid_mass_and_mode():
    d = free_stable_f1_grid()
    assert np.trapezoid(d.values, d.grid) == pytest.approx(1.0, abs=2e-3)
    res = optimize.minimize_scalar(lambda th: -math.sin(th) ** 2 / (math.pi * th), bounds=(0.1, 3.0),
                                   method="bounded", options={"xatol": 1e-10})
    # the grid is rescaled to the midpoint-rule mass, which shifts values by ~1e-4
    assert d.values.max() == pytest.approx(-res.fun, rel=1e-3)


def test_mp_mellin_against_quadrature():
    law = MarchenkoPastur()
    for g in (-0.3, 0.5, 2.0):
        ref = integrate.quad(lambda x: x ** g * law.density(x), 0.0, 4.0, limit=400)[0]
        assert law.mellin(g) == pytest.approx(ref, rel=1e-7)
    assert law.mellin(1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        law.mellin(-0.5)


def test_semicircle_and_cauchy_transforms():
    z = 0.7 + 0.4j
    s = Semicircle()
    ref = integrate.quad(lambda x: (s.density(x) / (z - x)).real, -2, 2)[0] + \
        1j * integrate.quad(lambda x: (s.density(x) / (z - x)).imag, -2, 2)[0]
    assert s.cauchy(z) == pytest.approx(ref, abs=1e-10)
    c = Cauchy(1.0, 2.0)
    assert c.cauchy(np.conj(z)) == pytest.approx(np.conj(c.cauchy(z)))


def test_cusp_cauchy_against_quadrature():
    a = 0.5
    law = CuspLaw(a)
    for z in (1.2 + 0.3j, 0.9 + 2.0j, 5.0 + 0.1j, 1.0 + 0.05j):
        def piece(lo, hi, wvar):
            parts = [integrate.quad(lambda x: fun(0.5 * a / (z - x)), lo, hi, weight="alg", wvar=wvar,
                                    limit=400, epsabs=1e-13)[0] for fun in (np.real, np.imag)]
            return parts[0] + 1j * parts[1]

        ref = piece(0.0, 1.0, (0.0, a - 1.0)) + piece(1.0, 2.0, (a - 1.0, 0.0))
        assert law.cauchy(z) == pytest.approx(ref, abs=1e-9)


def test_two_point_s_transform_inverts_moment_series():
    law = TwoPoint(2.0, 0.5, 0.3)
    y = -0.4
    u = (law.S(y) * y / (1.0 + y)).real
    psi = 0.3 * 2.0 * u / (1 - 2.0 * u) + 0.7 * 0.5 * u / (1 - 0.5 * u)
    assert psi == pytest.approx(y, rel=1e-13)


def test_mp_s_transform_and_inverse_law():
    law = MarchenkoPastur()
    z = np.array([-0.8, -0.5, -0.1])
    assert np.allclose(s_transform_of(law, z), 1.0 / (1.0 + z))
    assert np.allclose(s_transform_inverse_law(law, z), -z)


@given(st.floats(0.05, 0.95), st.floats(0.1, 5.0))
def test_boolean_power_sigma_is_semigroup(alpha, t):
    z = np.array([-3.0, -0.5, -0.01])
    base = BooleanStable(AdmissiblePair(alpha, 1.0))
    powered = boolean_stable_boxtimes_power(alpha, t)
    assert np.allclose(sigma_transform_of(powered, z), sigma_transform_of(base, z) ** t, rtol=1e-10)


def test_v_function_requirements():
    with pytest.raises(NotInfinitelyDivisibleError):
        v_function_of(FreeBessel(1.0, 0.5), -1.0 + 0j)
    assert v_function_of(PointMass(2.0), -1.0 + 0j) == pytest.approx(-math.log(2.0))
    with pytest.raises(NotInfinitelyDivisibleError):
        v_function_of(BooleanStable(AdmissiblePair(0.5, 0.5)), -1.0 + 0j)


def test_free_stable_voiculescu_alpha_one():
    z = 1.0 + 1.0j
    assert free_stable_voiculescu(1.0, 0.5, z) == pytest.approx(-0.5j * math.pi)


def test_log_cauchy_density_mass():
    # x = e^u turns the mass into int e^u p(e^u) du
    mass = integrate.quad(lambda u: math.exp(u) * log_cauchy_density(0.3, 0.8, math.exp(u)), -np.inf, np.inf)[0]
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_root_location_sanity():
    # MP S-transform fixed point: psi(u) for MP is solved by the Cauchy transform
    law = MarchenkoPastur()
    y = -0.3
    u = (law.S(y) * y / (1 + y)).real
    g = law.cauchy(1.0 / u + 0j).real / u
    assert g - 1.0 == pytest.approx(y, abs=1e-12)
    assert optimize.brentq(lambda x: x, -1, 1) == 0.0
