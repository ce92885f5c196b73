"""Wrapping laws on the line onto the unit circle, and unitary small-time limits.

The wrapping map sends the law of ``X`` to the law of ``exp(-i X)``.  A law
on the circle is stored through its moments ``m_n = E[zeta^n]``; angles ``y``
always refer to the point ``zeta = exp(-i y)``.

Also here: conversion between additive generating pairs ``(xi, tau)`` on the
line and multiplicative pairs ``(gamma, sigma)`` on the circle, moments of
the free unitary Brownian motion, and the Voiculescu-transform check for the
periodised free stable laws.
"""
from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .errors import ClassError, DomainError, TruncationError
from .laws import AdmissiblePair, Cauchy, free_stable_voiculescu
from .measures import AtomicMeasure, GridDensity, Mixed, f_transform, fmt17

__all__ = [
    "CircleMeasure",
    "FiniteMeasure",
    "PeriodicTau",
    "WrappedPair",
    "wrap",
    "circle_eta",
    "wrap_homomorphism_check",
    "series_identity_check",
    "additive_to_mult_pair",
    "mult_to_additive_pair",
    "unitary_bm_moment",
    "unitary_bm_limit_check",
    "UnitaryRow",
    "lambda_voiculescu",
    "lambda_voiculescu_convergence",
    "write_unitary_csv",
]

N_MOMENTS = 512
MAX_TRANSLATES = 200
TAIL_MASS = 1e-10
WRAP_POINTS = 4096
SERIES_TERMS = 10_000
DEFAULT_Z = (1j, 1.0 + 1j, -2.0 + 0.5j)
TWO_PI = 2.0 * math.pi


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class CircleMeasure:
    """Probability measure on the circle.

    Attributes
    ----------
    moments : complex ndarray
        ``m_0 .. m_N`` with ``m_n = E[zeta^n]``.
    density : GridDensity or None
        Density in the angle ``y in [-pi, pi)`` (``zeta = exp(-i y)``) when
        the measure was built from a density.
    tail_bound : float
        Mass left out when summing translates.
    """

    moments: np.ndarray
    density: GridDensity | None = None
    tail_bound: float = 0.0

    def __post_init__(self):
        m = np.asarray(self.moments, dtype=complex)
        if m.ndim != 1 or m.size < 2:
            raise DomainError("need at least the moments m_0 and m_1")
        if abs(m[0] - 1.0) > 1e-8:
            raise DomainError(f"m_0 = {m[0]!r}, expected 1")
        if np.any(np.abs(m) > 1.0 + 1e-8):
            raise DomainError("moments of a probability measure have modulus <= 1")
        object.__setattr__(self, "moments", m)

    @property
    def n_terms(self) -> int:
        return self.moments.size - 1


@dataclass(frozen=True)
class FiniteMeasure:
    """Finite non-negative measure: atoms plus a piecewise-linear density."""

    locations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    grid: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or np.any(w < 0):
            raise DomainError("atoms need matching locations and non-negative weights")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)
        if (self.grid is None) != (self.values is None):
            raise DomainError("grid and values go together")
        if self.grid is not None:
            g = np.asarray(self.grid, dtype=float)
            v = np.asarray(self.values, dtype=float)
            if g.shape != v.shape or g.ndim != 1 or np.any(np.diff(g) <= 0) or np.any(v < 0):
                raise DomainError("density part needs an increasing grid and non-negative values")
            object.__setattr__(self, "grid", g)
            object.__setattr__(self, "values", v)

    @property
    def mass(self) -> float:
        m = float(self.weights.sum())
        if self.grid is not None:
            m += float(np.sum(0.5 * (self.values[1:] + self.values[:-1]) * np.diff(self.grid)))
        return m

    def integrate(self, f) -> complex:
        """``int f dmeasure``; the density part by the trapezoid rule."""
        total = complex(np.sum(self.weights * f(self.locations))) if self.locations.size else 0j
        if self.grid is not None:
            y = self.values * f(self.grid)
            total += complex(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(self.grid)))
        return total


@dataclass(frozen=True)
class PeriodicTau:
    """``tau(dx) = 2/(1 + x^2) sum_n (base * delta_{2 pi n})(dx)``.

    ``base`` lives on ``[0, 2 pi)``.  Every measure ``tau`` with
    ``(1 + x^2) tau`` invariant under ``2 pi`` shifts has this form.
    """

    base: FiniteMeasure


@dataclass(frozen=True)
class WrappedPair:
    """Multiplicative generating pair: ``|gamma| = 1`` and ``sigma`` on angles ``[0, 2 pi)``."""

    gamma: complex
    sigma: FiniteMeasure
    truncation: float = 0.0

    def __post_init__(self):
        if abs(abs(self.gamma) - 1.0) > 1e-10:
            raise DomainError("gamma must have modulus one")
        if not math.isfinite(self.sigma.mass):
            raise DomainError("sigma must be finite")


# ------------------------------------------------------------------ wrap

def _atoms_of(mu):
    if isinstance(mu, AtomicMeasure):
        return mu.locations, mu.weights
    atomic = getattr(mu, "atomic", None)
    if isinstance(atomic, AtomicMeasure):
        return atomic.locations, atomic.weights
    return None


def _atomic_moments(loc, w, n_terms):
    n = np.arange(n_terms + 1)
    return np.sum(w[None, :] * np.exp(-1j * np.outer(n, loc)), axis=1)


def _wrapped_density(f, support, points=WRAP_POINTS):
    y = -math.pi + TWO_PI * np.arange(points) / points
    lo, hi = support
    bounded = math.isfinite(lo) and math.isfinite(hi)
    kmax = MAX_TRANSLATES
    if bounded:
        kmax = int(math.ceil(max(abs(lo), abs(hi)) / TWO_PI)) + 1
        if kmax > MAX_TRANSLATES:
            raise TruncationError("support needs more than the allowed number of translates")
    total = np.asarray(f(y), dtype=float).copy()
    for k in range(1, kmax + 1):
        total += np.asarray(f(y + TWO_PI * k), dtype=float) + np.asarray(f(y - TWO_PI * k), dtype=float)
        tail = max(0.0, 1.0 - float(np.sum(total)) * TWO_PI / points)
        if not bounded and tail < TAIL_MASS:
            return y, total, tail
    if bounded:
        return y, total, 0.0
    raise TruncationError(
        f"translate sum still misses mass {tail:.3g} after {MAX_TRANSLATES} translates")


def wrap(mu, n_terms: int = N_MOMENTS) -> CircleMeasure:
    """Law of ``exp(-i X)`` for ``X ~ mu``.

    Cauchy laws use their characteristic function, atoms are exact, and
    densities are folded onto ``[-pi, pi)`` by summing ``2 pi`` translates
    until the missed mass is below ``1e-10`` (at most 200 translates on
    each side); the moments of the folded density use the periodic
    trapezoid rule.

    Raises
    ------
    TruncationError
        If a density with unbounded support keeps too much mass outside
        200 translates.
    """
    if int(n_terms) != n_terms or n_terms < 1:
        raise DomainError("n_terms must be a positive integer")
    n = np.arange(n_terms + 1)
    if isinstance(mu, Cauchy):
        return CircleMeasure(np.exp(-1j * n * mu.beta - n * mu.gamma))
    atoms = _atoms_of(mu)
    if atoms is not None:
        return CircleMeasure(_atomic_moments(atoms[0], atoms[1], n_terms))
    if isinstance(mu, Mixed):
        m = _atomic_moments(mu.locations, mu.weights, n_terms)
        cm = wrap(mu.part, n_terms)
        return CircleMeasure(m + cm.moments * mu.part.mass, None, cm.tail_bound)
    density = getattr(mu, "density", None)
    if density is None:
        raise DomainError(f"cannot wrap {mu!r}: no atoms or density")
    support = getattr(mu, "support", (-math.inf, math.inf))
    if isinstance(mu, GridDensity):
        def f(x):
            return mu.density(x) / mu.mass
    else:
        f = density
    y, w, tail = _wrapped_density(f, support)
    h = TWO_PI / y.size
    m = h * (np.exp(-1j * np.outer(n, y)) @ w)
    # renormalise the quadrature mass only; the tail is reported, not hidden
    m = m / m[0].real
    grid_y = np.append(y, math.pi)
    grid_w = np.append(w, w[0])
    mass = float(np.sum(0.5 * (grid_w[1:] + grid_w[:-1]) * np.diff(grid_y)))
    dens = GridDensity(grid_y, grid_w / mass)
    return CircleMeasure(m, dens, tail)


def circle_eta(measure: CircleMeasure, z, tol: float = 1e-6):
    """``eta(z) = psi(z)/(1 + psi(z))`` with ``psi(z) = sum_{n>=1} m_n z^n``.

    The truncated series misses at most ``|z|^(N+1)/(1 - |z|)``.

    Raises
    ------
    TruncationError
        If that bound exceeds ``tol`` at some ``z``.
    """
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r >= 1.0):
        raise DomainError("circle_eta needs |z| < 1")
    N = measure.n_terms
    bound = float(np.max(r)) ** (N + 1) / (1.0 - float(np.max(r)))
    if bound > tol:
        raise TruncationError(f"{N} moments leave a tail up to {bound:.3g} at |z| = {float(np.max(r)):.3g}")
    coef = measure.moments[1:][::-1]
    # Horner in z for sum_{n=1}^N m_n z^n
    acc = np.zeros_like(z)
    for c in coef:
        acc = (acc + c) * z
    out = acc / (1.0 + acc)
    return out if out.ndim else complex(out)


def _F_of(mu, z):
    F = getattr(mu, "F", None)
    if F is not None:
        return np.asarray(F(z), dtype=complex)
    atoms = _atoms_of(mu)
    if atoms is not None and atoms[0].size == 1:
        return z - atoms[0][0]
    return np.asarray(f_transform(mu, z), dtype=complex)


def wrap_homomorphism_check(mu, z_samples=DEFAULT_Z, n_terms: int = N_MOMENTS,
                            class_tol: float = 1e-9) -> float:
    """``max |exp(i F(z)) - eta_{W(mu)}(exp(i z))|`` over the samples.

    Raises
    ------
    ClassError
        If ``F(z + 2 pi) = F(z) + 2 pi`` fails at a sample, i.e. ``mu`` is not
        in the class on which wrapping is a homomorphism.
    """
    z = np.asarray(z_samples, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("samples must lie in the upper half-plane")
    Fz = _F_of(mu, z)
    gap = _F_of(mu, z + TWO_PI) - Fz - TWO_PI
    if np.any(np.abs(gap) > class_tol * np.maximum(1.0, np.abs(Fz))):
        raise ClassError(f"F(z + 2 pi) - F(z) - 2 pi = {complex(gap[np.argmax(np.abs(gap))]):.3g}")
    lhs = np.exp(1j * Fz)
    rhs = np.asarray(circle_eta(wrap(mu, n_terms), np.exp(1j * z)))
    return float(np.max(np.abs(lhs - rhs)))


def series_identity_check(x: float, n_terms: int = SERIES_TERMS) -> tuple:
    """``(sum_n (x - 2 pi n)^(-2), 1/(2(1 - cos x)))``.

    The sum runs over ``|n| <= n_terms``; the rest is replaced by its
    midpoint-integral estimate ``1/(2 pi (2 pi M - x)) + 1/(2 pi (2 pi M + x))``,
    ``M = n_terms + 1/2``, which is accurate to ``O(n_terms^-4)``.
    """
    x = float(x)
    if abs(math.remainder(x, TWO_PI)) < 1e-300:
        raise DomainError("x must not be a multiple of 2 pi")
    n = np.arange(-n_terms, n_terms + 1, dtype=float)
    terms = 1.0 / (x - TWO_PI * n) ** 2
    M = n_terms + 0.5
    tail = 1.0 / (TWO_PI * (TWO_PI * M - x)) + 1.0 / (TWO_PI * (TWO_PI * M + x))
    lhs = math.fsum(np.sort(terms)) + tail
    rhs = 1.0 / (4.0 * math.sin(0.5 * x) ** 2)
    return lhs, rhs


# -------------------------------------------------------- generating pairs

def _fold_factor(y, n_terms=SERIES_TERMS):
    """``2 (1 - cos y) sum_n (y + 2 pi n)^(-2)`` by truncation plus tail estimate.

    Each term is written as ``sinc(u / 2 pi)^2`` so the value stays finite at
    ``y`` in ``2 pi Z``, where it tends to one.
    """
    y = np.asarray(y, dtype=float)
    n = np.arange(-n_terms, n_terms + 1, dtype=float)
    u = y[..., None] + TWO_PI * n
    M = n_terms + 0.5
    tail = 1.0 / (TWO_PI * (TWO_PI * M + y)) + 1.0 / (TWO_PI * (TWO_PI * M - y))
    return np.sum(np.sinc(u / TWO_PI) ** 2, axis=-1) + 4.0 * np.sin(0.5 * y) ** 2 * tail


def _gamma_kernel_sum(y, n_terms=SERIES_TERMS):
    """``sum_n (sin u - u/(1+u^2))/u^2`` with ``u = y + 2 pi n``, skipping ``u = 0``."""
    y = np.asarray(y, dtype=float)
    n = np.arange(-n_terms, n_terms + 1, dtype=float)
    u = y[..., None] + TWO_PI * n
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(u == 0.0, 0.0, (np.sin(u) - u / (1.0 + u * u)) / (u * u))
    # tails: sin y * (inverse-square tail) and the odd 1/u^3 part, which
    # cancels between n and -n up to O(M^-4)
    M = n_terms + 0.5
    tail = np.sin(y) * (1.0 / (TWO_PI * (TWO_PI * M + y)) + 1.0 / (TWO_PI * (TWO_PI * M - y)))
    return np.sum(k, axis=-1) + tail


def _forward_kernel(x):
    # (sin x - x/(1+x^2)) (1+x^2)/x^2, with its limit 0 at x = 0
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        v = (np.sin(x) - x / (1.0 + x * x)) * (1.0 + x * x) / (x * x)
    return np.where(np.abs(x) < 1e-6, x * (5.0 / 6.0), v)


def additive_to_mult_pair(xi: float, tau, n_terms: int = SERIES_TERMS) -> WrappedPair:
    """Generating pair ``(gamma, sigma)`` of the wrapped law of the pair ``(xi, tau)``.

    ``gamma = exp(-i xi - i int (sin x - x/(1+x^2)) (1+x^2)/x^2 dtau)``;
    on ``y in (0, 2 pi)``, ``sigma(dy) = (1 - cos y) sum_n (1+u^2)/u^2 tau(du)``
    with ``u = y + 2 pi n``; ``sigma({0}) = tau({0})/2``.

    Parameters
    ----------
    xi : float
    tau : FiniteMeasure on the line (atoms and a compactly supported
        density) or PeriodicTau
    """
    if isinstance(tau, PeriodicTau):
        base = tau.base
        # (1+u^2) tau(du) = 2 base(dy) for every translate u = y + 2 pi n
        drift = 2.0 * base.integrate(lambda y: _gamma_kernel_sum(y, n_terms)).real

        at0 = np.isclose(np.cos(base.locations), 1.0, rtol=0.0, atol=1e-15)
        sig_loc = base.locations[~at0]
        sig_w = base.weights[~at0] * _fold_factor(sig_loc, n_terms)
        if np.any(at0):
            # tau({0}) = 2 base({0}) and sigma({1}) = tau({0}) / 2
            sig_loc = np.concatenate([[0.0], sig_loc])
            sig_w = np.concatenate([[float(base.weights[at0].sum())], sig_w])
        grid = values = None
        if base.grid is not None:
            grid = base.grid
            values = base.values * _fold_factor(grid, n_terms)
        order = np.argsort(sig_loc)
        sigma = FiniteMeasure(sig_loc[order], sig_w[order], grid, values)
        gamma = cmath.exp(-1j * xi - 1j * drift)
        return WrappedPair(gamma / abs(gamma), sigma, truncation=1.0 / (TWO_PI ** 2 * n_terms))

    if not isinstance(tau, FiniteMeasure):
        raise DomainError("tau must be a FiniteMeasure or PeriodicTau")
    drift = tau.integrate(_forward_kernel).real
    gamma = cmath.exp(-1j * xi - 1j * drift)
    loc, w = tau.locations, tau.weights
    y = np.mod(loc, TWO_PI)
    zero = loc == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        wt = np.where(zero, 0.5 * w, (1.0 - np.cos(y)) * (1.0 + loc ** 2) / loc ** 2 * w)
    # atoms at nonzero multiples of 2 pi leave no trace on the circle
    keep = zero | (np.abs(1.0 - np.cos(y)) > 0)
    y, wt = y[keep], wt[keep]
    uniq, inv = np.unique(y, return_inverse=True)
    sw = np.zeros(uniq.size)
    np.add.at(sw, inv, wt)
    grid = values = None
    if tau.grid is not None:
        lo, hi = tau.grid[0], tau.grid[-1]
        grid = np.linspace(0.0, TWO_PI, 2049)
        values = np.zeros_like(grid)
        for k in range(int(math.floor(lo / TWO_PI)) - 1, int(math.ceil(hi / TWO_PI)) + 1):
            u = grid + TWO_PI * k
            f = np.interp(u, tau.grid, tau.values, left=0.0, right=0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                fac = np.where(u == 0.0, 0.5, (1.0 - np.cos(grid)) * (1.0 + u * u) / (u * u))
            values = values + fac * f
    return WrappedPair(gamma / abs(gamma), FiniteMeasure(uniq, sw, grid, values))


def mult_to_additive_pair(gamma: complex, sigma: FiniteMeasure, arg_choice: float,
                          n_terms: int = SERIES_TERMS) -> tuple:
    """Additive pair ``(xi, tau)`` whose wrapped law has pair ``(gamma, sigma)``.

    ``tau = 2/(1+x^2) sum_n sigma(. - 2 pi n)`` (returned as
    :class:`PeriodicTau`) and
    ``xi = -arg_choice - int (sin x - x/(1+x^2)) (1+x^2)/x^2 dtau``.

    Parameters
    ----------
    gamma : complex of modulus one
    sigma : FiniteMeasure on angles ``[0, 2 pi)``
    arg_choice : float
        The argument of ``gamma`` to use.  It must satisfy
        ``exp(i arg_choice) = gamma``; different choices differ by ``2 pi n``
        and give the different pre-images.
    """
    gamma = complex(gamma)
    if abs(abs(gamma) - 1.0) > 1e-10:
        raise DomainError("gamma must have modulus one")
    if abs(cmath.exp(1j * arg_choice) - gamma) > 1e-10:
        raise DomainError("arg_choice is not an argument of gamma")
    for arr in (sigma.locations, sigma.grid if sigma.grid is not None else np.zeros(0)):
        if arr.size and (arr.min() < 0.0 or arr.max() > TWO_PI):
            raise DomainError("sigma must live on angles in [0, 2 pi]")
    drift = 2.0 * sigma.integrate(lambda y: _gamma_kernel_sum(y, n_terms)).real
    xi = -float(arg_choice) - drift
    return xi, PeriodicTau(sigma)


# --------------------------------------------------- unitary Brownian motion

def unitary_bm_moment(t: float, m: int) -> float:
    """``E[U_t^m]`` for the free unitary Brownian motion.

    ``exp(-m t/2) sum_{k<m} (-1)^k t^k/k! m^(k-1) C(m, k+1)``; the terms are
    formed in log space.
    """
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    if t < 0:
        raise DomainError("t must be non-negative")
    m = int(m)
    if t == 0:
        return 1.0
    lg = specfun.log_gamma
    lt, lm = math.log(t), math.log(m)
    terms = []
    for k in range(m):
        log_binom = lg(m + 1.0) - lg(k + 2.0) - lg(m - k + 0.0)
        log_mag = k * lt - lg(k + 1.0) + (k - 1) * lm + log_binom
        terms.append((-1.0) ** k * math.exp(log_mag))
    return math.exp(-0.5 * m * t) * math.fsum(terms)


@dataclass(frozen=True)
class UnitaryRow:
    t: float
    n: int
    value: float
    limit: float

    @property
    def abs_err(self) -> float:
        return abs(self.value - self.limit)


def _floor_power(t, p):
    # floor(t^p), guarding against t^p landing just below an integer
    return int(math.floor(t ** p * (1.0 + 1e-12)))


def unitary_bm_limit_check(t_list, ns=(1, 2, 3)) -> list:
    """Rows ``(t, n, E[U_t^{n [t^-1/2]}], J_1(2n)/n)``."""
    rows = []
    for t in t_list:
        a = _floor_power(float(t), -0.5)
        for n in ns:
            rows.append(UnitaryRow(float(t), int(n), unitary_bm_moment(float(t), n * a),
                                   specfun.bessel_j1(2.0 * n) / n))
    return rows


def write_unitary_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "n", "value", "limit", "abs_err"])
        for r in rows:
            w.writerow([fmt17(r.t), r.n, fmt17(r.value), fmt17(r.limit), fmt17(r.abs_err)])


# ------------------------------------------------ periodised free stable

def lambda_voiculescu(alpha: float, rho: float, t: float, z, shift: str = "centering"):
    """Voiculescu transform of the rescaled time-t law of the periodised stable family.

    For ``alpha != 1``, ``a = [t^(-1/alpha)]`` and
    ``phi_t(z) = t a phi(tan(z/a))`` with ``phi`` the free stable transform.
    For ``alpha = 1``, ``a = [1/t]`` and a shift ``B`` is added:
    ``shift="centering"`` uses ``B = -(1 - 2 rho) t a log a``, which cancels the
    logarithmic drift exactly; ``shift="log-power"`` uses
    ``B = (1 - rho) log t`` for comparison.
    """
    p = AdmissiblePair(alpha, rho)
    z = np.asarray(z, dtype=complex)
    if p.alpha != 1.0:
        a = _floor_power(t, -1.0 / p.alpha)
        return t * a * np.asarray(free_stable_voiculescu(p.alpha, p.rho, np.tan(z / a)))
    a = _floor_power(t, -1.0)
    base = t * a * np.asarray(free_stable_voiculescu(1.0, p.rho, np.tan(z / a)))
    if shift == "centering":
        B = -(1.0 - 2.0 * p.rho) * t * a * math.log(a)
    elif shift == "log-power":
        B = (1.0 - p.rho) * math.log(t)
    else:
        raise DomainError(f"unknown shift {shift!r}")
    return base + B


def lambda_voiculescu_convergence(alpha: float, rho: float, t_list, z_samples=DEFAULT_Z,
                                  shift: str = "centering") -> list:
    """``[(t, max_z |phi_t(z) - phi_{f_{alpha,rho}}(z)|)]`` in the order of ``t_list``."""
    z = np.asarray(z_samples, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("samples must lie in the upper half-plane")
    target = np.asarray(free_stable_voiculescu(alpha, rho, z))
    out = []
    for t in t_list:
        val = lambda_voiculescu(alpha, rho, float(t), z, shift)
        out.append((float(t), float(np.max(np.abs(val - target)))))
    return out
