"""Mellin moments of multiplicative free powers through the S-transform.

Contents
--------
hm_mellin
    ``int x^g dmu`` from ``S_mu`` on ``(-1, 0)`` by Gauss-Jacobi quadrature.
free_bessel_moment_closed_form, free_bessel_moment_s1
    ``g``-moments of ``D_{t^r}((pi(r, s)^{[t]})^{1/t})`` in closed form.
nu_alpha_series, multi_law_series
    ``(-g)``-Mellin moments of ``(nu^{[t]})^xi`` as (multi-)power series.
laplace_free_stable
    ``E[exp(-g F)]`` for the positive free stable law of index ``alpha``.

All gamma ratios are formed from log-gamma differences; with ``xi = 1/t`` the
individual gamma values overflow long before the ratios do.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import roots_jacobi

from . import specfun
from .errors import ConvergenceError, DivergenceError, DomainError
from .laws import dh_mellin, s_transform_of
from .measures import fmt17
from .specfun import DEFAULT_CONTROL, SeriesControl

__all__ = [
    "MomentTable",
    "SeriesResult",
    "hm_mellin",
    "free_bessel_moment_closed_form",
    "free_bessel_moment_s1",
    "free_bessel_table",
    "nu_alpha_series",
    "nu_alpha_series_result",
    "nu_alpha_table",
    "as5_term_bound",
    "laplace_free_stable",
    "multi_law_series",
    "multi_law_series_result",
    "write_moment_csv",
]

QUADRATURE_ORDERS = (64, 128, 256, 512, 1024)
SMALL_RUN = 20
# terms of the positive hypergeometric series are summed in blocks of this size
_BLOCK = 65536
_MAX_POSITIVE_TERMS = 5_000_000


@dataclass(frozen=True)
class MomentTable:
    """Moments at one time ``t`` next to their limits."""

    gammas: tuple
    t: float
    values: tuple
    limit_values: tuple

    def __post_init__(self):
        n = len(self.gammas)
        if len(self.values) != n or len(self.limit_values) != n:
            raise DomainError("gammas, values and limit_values must have equal length")
        if not all(math.isfinite(v) for v in self.values):
            raise DomainError("moment values must be finite")

    @property
    def abs_err(self) -> tuple:
        return tuple(abs(v - l) for v, l in zip(self.values, self.limit_values))

    @property
    def rel_err(self) -> tuple:
        return tuple(abs(v - l) / abs(l) for v, l in zip(self.values, self.limit_values))


def write_moment_csv(tables, path) -> None:
    """CSV ``gamma,t,value,limit,abs_err`` for one or several tables."""
    if isinstance(tables, MomentTable):
        tables = [tables]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gamma", "t", "value", "limit", "abs_err"])
        for tab in tables:
            for g, v, l, e in zip(tab.gammas, tab.values, tab.limit_values, tab.abs_err):
                w.writerow([fmt17(g), fmt17(tab.t), fmt17(v), fmt17(l), fmt17(e)])


# ------------------------------------------------------------ S to Mellin

def _endpoint_exponent(f, x1, x2):
    k = math.log(f(x1) / f(x2)) / math.log(x1 / x2)
    # the two-point slope carries an O(x2) bias; a leftover (1 - x)^eps in the
    # integrand stalls Gauss-Jacobi, so snap to a nearby small-denominator fraction
    snapped = float(Fraction(k).limit_denominator(128))
    return snapped if abs(k - snapped) < 1e-7 else k


def hm_mellin(law, gamma: float, orders=QUADRATURE_ORDERS, rtol: float = 1e-10) -> float:
    """Mellin moment ``int x^gamma dmu`` from the S-transform.

    Uses

        int x^g dmu = sin(pi g)/(pi g) int_0^1 x^g (1 - x)^(-g) S(x - 1)^(-g) dx.

    The power-law behaviour of ``S(x - 1)`` at both ends is measured and
    folded into the Gauss-Jacobi weight, so the remaining integrand is
    bounded and smooth at the endpoints.

    Parameters
    ----------
    law : object accepted by :func:`laws.s_transform_of`
    gamma : float
        Exponent in ``(-1, 1)``, nonzero.
    orders : sequence of int
        Increasing quadrature orders; the result is accepted once two
        consecutive orders agree to ``rtol``.

    Raises
    ------
    DivergenceError
        If the integral is infinite at an endpoint or the quadrature does
        not settle.
    """
    g = float(gamma)
    if not (-1.0 < g < 1.0) or g == 0.0:
        raise DomainError("gamma must lie in (-1, 1) and be nonzero")

    def S(x):
        return np.real(np.asarray(s_transform_of(law, np.asarray(x, dtype=float) - 1.0 + 0j)))

    def S1(x):
        return float(S(np.array([x]))[0])

    k0 = _endpoint_exponent(S1, 1e-10, 1e-8)
    k1 = _endpoint_exponent(lambda e: S1(1.0 - e), 1e-10, 1e-8)
    beta_exp = g * (1.0 - k0)          # power of x at x -> 0
    alpha_exp = -g * (1.0 + k1)        # power of (1 - x) at x -> 1
    if beta_exp <= -1.0 or alpha_exp <= -1.0:
        raise DivergenceError(
            f"Mellin integrand is not integrable (endpoint powers {beta_exp:.4g}, {alpha_exp:.4g})")
    prefactor = 2.0 ** (-1.0 - alpha_exp - beta_exp)
    prev = None
    for n in orders:
        u, w = roots_jacobi(int(n), alpha_exp, beta_exp)
        x = 0.5 * (1.0 + u)
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            rest = np.exp(-g * np.log(S(x)) + g * k0 * np.log(x) + g * k1 * np.log1p(-x))
        if not np.all(np.isfinite(rest)):
            raise DivergenceError("S-transform is not positive and finite on (-1, 0)")
        val = prefactor * float(np.dot(w, rest))
        if prev is not None and abs(val - prev) <= rtol * max(1.0, abs(val)):
            return math.sin(math.pi * g) / (math.pi * g) * val
        prev = val
    raise DivergenceError(f"quadrature did not settle up to order {orders[-1]}")


# ------------------------------------------------------------- free Bessel

def _is_int(v: float) -> bool:
    return abs(v - round(v)) < 1e-12


def _log_terminating(n_max: int, a, b, c, z) -> float:
    # 2F1(-n_max, b; c; z) for z < 0: every term is positive
    term, total = 1.0, 1.0
    for n in range(n_max):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
    if total <= 0:
        raise ConvergenceError("terminating 2F1 is not positive")
    return math.log(total)


def _log_positive_pfaff(a, b, c, z) -> float | None:
    # 2F1(a,b;c;z) = (1-z)^(-b) 2F1(c-a, b; c; z/(z-1)); with c-a, b, c > 0
    # and z < 0 every term is positive, so the sum is accumulated in logs
    w = z / (z - 1.0)
    p = c - a
    lw = math.log(w)
    start, log_last, running = 0, 0.0, -math.inf
    peak = -math.inf
    while start < _MAX_POSITIVE_TERMS:
        n = np.arange(start, start + _BLOCK, dtype=float)
        lr = np.log(p + n) + np.log(b + n) - np.log(c + n) - np.log1p(n) + lw
        logs = log_last + np.cumsum(lr)
        running = np.logaddexp(running, np.logaddexp.reduce(logs)) if start else np.logaddexp.reduce(logs)
        peak = max(peak, float(logs.max()))
        log_last = float(logs[-1])
        start += _BLOCK
        if lr[-1] < 0 and log_last < peak - 60.0:
            log_total = float(np.logaddexp(0.0, running))
            return -b * math.log1p(-z) + log_total
    return None


def _log_connection(a, b, c, z) -> float:
    # connection formula around 1/(1-z); for z << -1 the argument is small
    x = 1.0 / (1.0 - z)
    sgl = specfun.gamma_sign_log
    total = 0.0
    s1, l1 = sgl(c)
    s2, l2 = sgl(b - a)
    s3, l3 = sgl(b)
    s4, l4 = sgl(c - a)
    f1 = specfun.hyp2f1(a, c - b, a - b + 1.0, x)
    total += s1 * s2 * s3 * s4 * math.exp(l1 + l2 - l3 - l4 - a * math.log1p(-z)) * f1
    if not (_is_int(c - b) and c - b <= 0) and not (_is_int(a) and a <= 0):
        s5, l5 = sgl(a - b)
        s6, l6 = sgl(a)
        s7, l7 = sgl(c - b)
        f2 = specfun.hyp2f1(b, c - a, b - a + 1.0, x)
        log_mag = l1 + l5 - l6 - l7 - b * math.log1p(-z)
        if log_mag > -745.0:
            total += s1 * s5 * s6 * s7 * math.exp(log_mag) * f2
    if total <= 0:
        raise ConvergenceError("connection formula for 2F1 gave a non-positive value")
    return math.log(total)


def _log_hyp2f1_bessel(g, b, c, z) -> float:
    """``log 2F1(-g, b; c; z)`` for ``g > 0``, ``b, c > 0`` and ``z < 0``."""
    if _is_int(g):
        return _log_terminating(int(round(g)), -g, b, c, z)
    out = _log_positive_pfaff(-g, b, c, z)
    if out is not None:
        return out
    cp = -g - b + 1.0
    if _is_int(cp) and cp <= 0:
        # the two connection terms have cancelling poles here; average the
        # neighbours b -/+ h, which removes the poles and leaves O(h^2)
        h = 1e-4
        lo = _log_connection(-g, b - h, c, z)
        hi = _log_connection(-g, b + h, c, z)
        return float(np.logaddexp(lo, hi)) - math.log(2.0)
    return _log_connection(-g, b, c, z)


def free_bessel_moment_closed_form(r: float, s: float, gamma: float, t: float) -> float:
    """``gamma``-moment of ``D_{t^r}((pi(r, s)^{[t]})^{1/t})`` for ``r >= 1, s > 1``.

    With ``xi = 1/t`` the moment is

        t^(r g) (s - 1)^g Gamma(g xi + g (r - 1) + 1) / (Gamma(2 + g (r - 1)) Gamma(g xi + 1))
            * 2F1(-g, g xi + g (r - 1) + 1; g (r - 1) + 2; -1/(s - 1)).

    For integer ``g`` the hypergeometric factor is a positive polynomial; for
    other ``g`` it is summed after a Pfaff transformation that makes every
    term positive, or through the connection formula when ``s`` is so close
    to one that the positive series would be too long.
    """
    if r < 1 or s <= 1 or gamma <= 0 or t <= 0:
        raise DomainError("need r >= 1, s > 1, gamma > 0 and t > 0")
    g = float(gamma)
    xi = 1.0 / float(t)
    lg = specfun.log_gamma
    b = g * xi + g * (r - 1.0) + 1.0
    c = g * (r - 1.0) + 2.0
    z = -1.0 / (s - 1.0)
    log_val = (r * g * math.log(t) + g * math.log(s - 1.0)
               - lg(c) + lg(b) - lg(g * xi + 1.0)
               + _log_hyp2f1_bessel(g, b, c, z))
    return math.exp(log_val)


def free_bessel_moment_s1(r: float, gamma: float, t: float) -> float:
    """Same moment for ``s = 1``:
    ``t^(r g) Gamma(g xi (1 + t r) + 1) / (Gamma(g xi t r + 2) Gamma(1 + g xi))``."""
    if r < 0 or gamma <= 0 or t <= 0:
        raise DomainError("need r >= 0, gamma > 0 and t > 0")
    g = float(gamma)
    xi = 1.0 / float(t)
    lg = specfun.log_gamma
    log_val = (r * g * math.log(t) + lg(g * xi * (1.0 + t * r) + 1.0)
               - lg(g * xi * t * r + 2.0) - lg(1.0 + g * xi))
    return math.exp(log_val)


def free_bessel_table(r: float, s: float, t: float, gammas) -> MomentTable:
    """Closed-form moments at ``t`` against the DH_r moments ``g^(r g)/Gamma(2 + r g)``."""
    fn = (lambda g: free_bessel_moment_s1(r, g, t)) if s == 1 else \
        (lambda g: free_bessel_moment_closed_form(r, s, g, t))
    vals = tuple(fn(float(g)) for g in gammas)
    lims = tuple(dh_mellin(r, float(g)) for g in gammas)
    return MomentTable(tuple(float(g) for g in gammas), float(t), vals, lims)


# --------------------------------------------------------- nu_alpha series

@dataclass(frozen=True)
class SeriesResult:
    """Value of a positive series, its length and a bound on the neglected tail."""

    value: float
    terms: int
    tail_bound: float


def _compositions(d: int, k: int) -> np.ndarray:
    if k == 1:
        return np.array([[d]])
    rows = [c for c in itertools.product(range(d + 1), repeat=k - 1) if sum(c) <= d]
    return np.array([list(c) + [d - sum(c)] for c in rows])


def _diagonal_series(log_c, deltas, x, ctl: SeriesControl) -> SeriesResult:
    """Sum of ``prod_i c_i^{m_i}/m_i! * g(Y)`` over multi-indices ``m``.

    ``Y = sum m_i delta_i`` and ``g(Y) = Gamma(1 + x + Y)/(Gamma(1 + x) Gamma(2 + Y))``,
    or ``1/Gamma(2 + Y)`` when ``x`` is None.  Diagonals ``|m| = d`` are
    summed in turn.

    Tail bound: raising ``m_i`` by one multiplies a term by at most
    ``c_i/(m_i + 1) * (1 + delta_i/2) * max(1, (1 + x + Y)/(2 + Y))^delta_i``
    (Wendel's inequality for gamma ratios, ``0 < delta_i <= 1``).  Every index
    on diagonal ``d + 1`` comes from one on diagonal ``d`` by raising a largest
    coordinate, which is at least ``(d + 1)/k``, and each index has at most
    ``k`` successors, so the diagonal sums satisfy ``D_{d+1} <= R_d D_d`` with
    ``R_d = k^2 max_i c_i B_i(d delta_min) / (d + 1)``.  ``R_d`` decreases in
    ``d``; once it is below one the tail is at most ``D_d R_d / (1 - R_d)``.
    """
    log_c = np.asarray(log_c, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    k = len(log_c)
    dmin = float(deltas.min())
    lga = specfun.log_gamma_array
    base = 0.0 if x is None else specfun.log_gamma(1.0 + x)
    log_total = -math.inf
    small = 0
    for d in range(ctl.max_terms):
        m = _compositions(d, k)
        Y = m @ deltas
        lt = m @ log_c - np.sum(lga(m + 1.0), axis=1) - lga(2.0 + Y)
        if x is not None:
            lt = lt + lga(1.0 + x + Y) - base
        log_d = float(np.logaddexp.reduce(lt))
        log_total = float(np.logaddexp(log_total, log_d))
        small = small + 1 if log_d <= math.log(ctl.rel_tol) + log_total else 0
        ymin = d * dmin
        ratio = 1.0 if x is None else max(1.0, (1.0 + x + ymin) / (2.0 + ymin))
        if x is None:
            bi = (1.0 + deltas / 2.0) * (2.0 + ymin) ** (-deltas)
        else:
            bi = (1.0 + deltas / 2.0) * ratio ** deltas
        R = k * k * float(np.max(np.exp(log_c) * bi)) / (d + 1.0)
        if small >= SMALL_RUN and R < 1.0:
            tail = math.exp(log_d - log_total) * R / (1.0 - R)
            if tail <= ctl.rel_tol:
                total = math.exp(log_total)
                return SeriesResult(total, d + 1, tail * total)
    raise ConvergenceError(f"series did not converge within {ctl.max_terms} diagonals")


def nu_alpha_series_result(alpha: float, gamma: float, t: float, xi: float,
                           ctl: SeriesControl = DEFAULT_CONTROL) -> SeriesResult:
    """:func:`nu_alpha_series` together with its term count and tail bound."""
    if not (1.0 < alpha <= 2.0) or gamma <= 0 or t <= 0 or xi <= 0:
        raise DomainError("need alpha in (1, 2] and gamma, t, xi > 0")
    x = gamma * xi
    return _diagonal_series([math.log(x * t)], [alpha - 1.0], x, ctl)


def nu_alpha_series(alpha: float, gamma: float, t: float, xi: float,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``int x^(-gamma) d(nu_alpha^{[t]})^xi``.

    Sum over ``n >= 0`` of ``(g xi t)^n/n! * Gamma(1 + n(alpha-1) + g xi) /
    (Gamma(1 + g xi) Gamma(2 + n(alpha-1)))``.
    """
    return nu_alpha_series_result(alpha, gamma, t, xi, ctl).value


def as5_term_bound(alpha: float, gamma: float, t: float, xi: float, rel_tol: float = 1e-14) -> int:
    """Series length guaranteed by the Stirling-type dominating sequence.

    For ``y = n(alpha-1) >= x = g xi`` the binomial entropy bound gives
    ``term_n <= q^n/n!`` with ``q = t x^alpha (2e)^(alpha-1)``.  Returns the
    first ``N`` with ``N (alpha-1) >= x`` and ``sum_{n>=N} q^n/n! <= rel_tol``
    (the series itself is at least one).
    """
    x = gamma * xi
    d = alpha - 1.0
    q = t * x ** alpha * (2.0 * math.e) ** d
    n = max(int(math.ceil(x / d)), int(math.ceil(q)))
    while True:
        log_term = n * math.log(q) - specfun.log_gamma(n + 1.0) if q > 0 else -math.inf
        ratio = q / (n + 1.0)
        if ratio < 1.0 and log_term - math.log1p(-ratio) <= math.log(rel_tol):
            return n
        n += 1


def nu_alpha_table(alpha: float, t: float, gammas) -> MomentTable:
    """``(-g)``-moments at ``xi = t^(-1/alpha)`` against ``E[exp(-g F_alpha)]``."""
    xi = t ** (-1.0 / alpha)
    vals = tuple(nu_alpha_series(alpha, float(g), t, xi) for g in gammas)
    lims = tuple(laplace_free_stable(alpha, float(g)) for g in gammas)
    return MomentTable(tuple(float(g) for g in gammas), float(t), vals, lims)


def laplace_free_stable(alpha: float, gamma: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``E[exp(-gamma F)]`` for the free stable law of index ``alpha in (1, 2]``
    with support bounded below: ``sum_n gamma^(n alpha) / (Gamma(2 + (alpha-1) n) n!)``."""
    if not (1.0 < alpha <= 2.0) or gamma < 0:
        raise DomainError("need alpha in (1, 2] and gamma >= 0")
    if gamma == 0:
        return 1.0
    return _diagonal_series([alpha * math.log(gamma)], [alpha - 1.0], None, ctl).value


def multi_law_series_result(alphas, ps, gamma: float, t: float, xi: float,
                            ctl: SeriesControl = DEFAULT_CONTROL) -> SeriesResult:
    """:func:`multi_law_series` with term count and tail bound."""
    alphas = [float(a) for a in alphas]
    ps = [float(p) for p in ps]
    k = len(alphas)
    if not (1 <= k <= 3) or len(ps) != k:
        raise DomainError("need 1 <= k <= 3 indices and as many weights")
    if any(not (1.0 < a <= 2.0) for a in alphas) or any(a <= b for a, b in zip(alphas, alphas[1:])):
        raise DomainError("indices must be strictly decreasing in (1, 2]")
    if any(p <= 0 for p in ps) or gamma <= 0 or t <= 0 or xi <= 0:
        raise DomainError("weights, gamma, t and xi must be positive")
    x = gamma * xi
    log_c = [math.log(x * t * p) for p in ps]
    return _diagonal_series(log_c, [a - 1.0 for a in alphas], x, ctl)


def multi_law_series(alphas, ps, gamma: float, t: float, xi: float,
                     ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``(-gamma)``-Mellin moment of ``(nu(alphas, ps)^{[t]})^xi``.

    ``nu(alphas, ps)`` is the multiplicative free convolution of the powers
    ``nu_{alpha_i}^{[p_i]}``; the sum runs over ``N_0^k`` diagonal by diagonal.
    """
    return multi_law_series_result(alphas, ps, gamma, t, xi, ctl).value
