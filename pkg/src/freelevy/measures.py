"""Measure representations and the analytic transform engine.

Transforms follow the conventions

    G(z) = int dmu(x) / (z - x),     F = 1 / G,     eta(z) = 1 - z F(1/z).

Complex points are plain Python/numpy complex numbers; every transform
accepts scalars or arrays.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BoundaryError,
    DivergenceError,
    DomainError,
    InversionError,
)

__all__ = [
    "DEFAULT_EPS_LADDER",
    "AtomicMeasure",
    "GridDensity",
    "Mixed",
    "KnownLaw",
    "BoundaryValue",
    "cauchy_transform",
    "f_transform",
    "eta_transform",
    "boundary_F",
    "stieltjes_invert",
    "mellin_moment",
    "sup_density_distance",
    "write_density_csv",
    "fmt17",
]

DEFAULT_EPS_LADDER = (1e-3, 5e-4, 2.5e-4)
_NEG_DENSITY_TOL = 1e-8


def fmt17(v) -> str:
    """Format a real number with 17 significant digits."""
    return format(float(v), ".17g")


def _clog1p(u):
    # log(1 + u) for complex u, accurate for small |u|
    u = np.asarray(u, dtype=complex)
    w = 1.0 + u
    d = w - 1.0
    out = np.empty_like(u)
    exact = d == 0
    out[exact] = u[exact]
    ne = ~exact
    out[ne] = np.log(w[ne]) * (u[ne] / d[ne])
    return out


class KnownLaw:
    """Base class for closed-form laws (see :mod:`freelevy.laws`).

    Subclasses implement whichever of ``cauchy``, ``boundary_cauchy``,
    ``density``, ``mellin`` their formulas allow.  ``support`` is the
    closed convex hull of the support.
    """

    name = "law"
    support: tuple = (-math.inf, math.inf)

    def cauchy(self, z):
        raise NotImplementedError(f"{self.name} has no Cauchy transform implementation")

    def density(self, x):
        raise NotImplementedError(f"{self.name} has no density implementation")

    # optional: boundary_cauchy(x) -> G(x + i0), mellin(gamma) -> float

    def __repr__(self):
        return f"{type(self).__name__}({self.name})"


@dataclass(frozen=True)
class AtomicMeasure:
    """Finite atomic probability measure.

    Parameters
    ----------
    locations : array_like
        Strictly increasing atom locations.
    weights : array_like
        Positive weights summing to one.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or loc.ndim != 1 or loc.size == 0:
            raise DomainError("locations and weights must be equal-length 1-d arrays")
        if np.any(np.diff(loc) <= 0):
            raise DomainError("atom locations must be strictly increasing")
        if np.any(w <= 0):
            raise DomainError("atom weights must be positive")
        if abs(w.sum() - 1.0) > 1e-12:
            raise DomainError(f"atom weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[float, float]]) -> "AtomicMeasure":
        pairs = sorted(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self):
        return (float(self.locations[0]), float(self.locations[-1]))

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.isin(z, self.locations.astype(complex))):
            raise BoundaryError("Cauchy transform evaluated at an atom")
        return np.sum(self.weights / (z[..., None] - self.locations), axis=-1)

    def boundary_cauchy(self, x):
        # G is real and analytic off the atoms
        return self.cauchy(np.asarray(x, dtype=float) + 0j)

    def mellin(self, gamma: float) -> float:
        loc = self.locations
        if np.any(loc < 0):
            raise DomainError("Mellin moment needs a measure on [0, inf)")
        if gamma < 0 and np.any(loc == 0):
            raise DivergenceError("negative Mellin moment of an atom at 0")
        with np.errstate(divide="ignore"):
            powers = np.where(loc == 0, 1.0 if gamma == 0 else 0.0, np.abs(loc) ** gamma)
        return float(np.sum(self.weights * powers))


def _trapezoid(y, x):
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


@dataclass(frozen=True)
class GridDensity:
    """Non-negative density sampled on a strictly increasing grid.

    The density is taken to be piecewise linear between grid points and zero
    outside ``[grid[0], grid[-1]]``.  ``mass`` is the trapezoid integral; it
    may be below one when only part of a law is represented.
    """

    grid: np.ndarray
    values: np.ndarray
    mass: float | None = None

    def __post_init__(self):
        x = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2:
            raise DomainError("grid and values must be equal-length 1-d arrays (>= 2 points)")
        if np.any(np.diff(x) <= 0):
            raise DomainError("grid must be strictly increasing")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise DomainError("density values must be finite and non-negative")
        trap = _trapezoid(v, x)
        m = trap if self.mass is None else float(self.mass)
        if abs(m - trap) > 1e-6:
            raise DomainError(f"declared mass {m!r} differs from trapezoid integral {trap!r}")
        if not (0.0 < m <= 1.0 + 1e-6):
            raise DomainError(f"mass must lie in (0, 1], got {m!r}")
        object.__setattr__(self, "grid", x)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "mass", m)

    @classmethod
    def from_function(cls, f: Callable, grid) -> "GridDensity":
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(f(grid), dtype=float))

    @property
    def support(self):
        return (float(self.grid[0]), float(self.grid[-1]))

    def density(self, x):
        return np.interp(x, self.grid, self.values, left=0.0, right=0.0)

    def cauchy(self, z):
        """Exact Cauchy transform of the piecewise-linear interpolant."""
        z = np.asarray(z, dtype=complex)
        a, b = self.grid[:-1], self.grid[1:]
        fa, fb = self.values[:-1], self.values[1:]
        inside = (z.imag == 0) & (z.real >= a[0]) & (z.real <= b[-1])
        if np.any(inside):
            raise BoundaryError("Cauchy transform on the real axis inside the grid support")
        h = b - a
        slope = (fb - fa) / h
        zz = z[..., None]
        # int_a^b dx/(z-x) = log((z-a)/(z-b)) = log1p(h/(z-b))
        logs = _clog1p(h / (zz - b))
        val = (fa + slope * (zz - a)) * logs - slope * h
        return np.sum(val, axis=-1)

    def mellin(self, gamma: float) -> float:
        x, v = self.grid, self.values
        if x[0] < 0:
            raise DomainError("Mellin moment needs a density on [0, inf)")
        with np.errstate(divide="ignore", invalid="ignore"):
            xg = np.where(x == 0, 0.0 if gamma > 0 else (1.0 if gamma == 0 else np.inf), x ** gamma)
        integrand = np.where(v == 0, 0.0, v * xg)
        val = _trapezoid(integrand, x)
        if not math.isfinite(val) or val > 1e12:
            raise DivergenceError(f"Mellin moment of order {gamma} diverges on the grid")
        return val


@dataclass(frozen=True)
class Mixed:
    """Atomic part plus a grid density part with total mass one."""

    locations: np.ndarray
    weights: np.ndarray
    part: GridDensity = field(default=None)

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.locations, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if loc.shape != w.shape or np.any(w <= 0) or np.any(np.diff(loc) <= 0):
            raise DomainError("invalid atomic part")
        total = w.sum() + (self.part.mass if self.part is not None else 0.0)
        if abs(total - 1.0) > 1e-6:
            raise DomainError(f"total mass {total!r} differs from 1")
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)

    @property
    def support(self):
        lo = min(self.locations[0], self.part.grid[0])
        hi = max(self.locations[-1], self.part.grid[-1])
        return (float(lo), float(hi))

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.isin(z, self.locations.astype(complex))):
            raise BoundaryError("Cauchy transform evaluated at an atom")
        atoms = np.sum(self.weights / (z[..., None] - self.locations), axis=-1)
        return atoms + self.part.cauchy(z)

    def mellin(self, gamma: float) -> float:
        if np.any(self.locations <= 0):
            raise DomainError("Mellin moment needs atoms in (0, inf)")
        return float(np.sum(self.weights * self.locations ** gamma)) + self.part.mellin(gamma)


# ---------------------------------------------------------------- transforms

def cauchy_transform(mu, z):
    """Cauchy transform ``G(z) = int dmu(x)/(z - x)``.

    Parameters
    ----------
    mu : AtomicMeasure, GridDensity, Mixed or KnownLaw
    z : complex or array of complex
        Evaluation points off the real axis, or real points outside the
        support.

    Returns
    -------
    complex or ndarray
    """
    out = mu.cauchy(z)
    return out if np.ndim(z) else complex(np.asarray(out).reshape(()))


def f_transform(mu, z):
    g = np.asarray(cauchy_transform(mu, z), dtype=complex)
    if np.any(np.abs(g) == 0.0):
        raise ZeroDivisionError("Cauchy transform vanishes; F is undefined")
    out = 1.0 / g
    return out if np.ndim(z) else complex(out)


def eta_transform(mu, z):
    """``eta(z) = 1 - z F(1/z)`` for ``z`` in the lower half-plane or ``z < 0``."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("eta transform needs z != 0")
    out = 1.0 - z * np.asarray(f_transform(mu, 1.0 / z))
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class BoundaryValue:
    """Boundary value with an error estimate (0 for exact evaluations)."""

    value: np.ndarray
    error: np.ndarray


def _richardson(g1, g2, g3):
    r1 = 2.0 * g2 - g1
    r2 = 2.0 * g3 - g2
    return r2, np.abs(r2 - r1)


def _ladder_eval(func, x, eps):
    x = np.asarray(x, dtype=float)
    return [np.asarray(func(x + 1j * e), dtype=complex) for e in eps]


def boundary_F(mu, x, eps_ladder=DEFAULT_EPS_LADDER, tol: float | None = None) -> BoundaryValue:
    """Boundary value ``F(x + i0)`` on the real axis.

    Laws exposing an exact ``boundary_cauchy`` are evaluated directly.
    Otherwise ``F(x + i eps)`` is evaluated along ``eps_ladder`` (three
    halving steps) and extrapolated with one Richardson step per pair; the
    spread of the two extrapolants is the error estimate.

    Raises
    ------
    BoundaryError
        If the ladder differences do not shrink, the values are not finite,
        or the error estimate exceeds ``tol``.
    """
    x = np.asarray(x, dtype=float)
    exact = getattr(mu, "boundary_cauchy", None)
    if exact is not None:
        g = np.asarray(exact(x), dtype=complex)
        if np.any(g == 0) or not np.all(np.isfinite(g)):
            raise BoundaryError("boundary Cauchy transform vanishes or is not finite")
        return BoundaryValue(1.0 / g, np.zeros(x.shape))
    eps = tuple(eps_ladder)
    if len(eps) != 3:
        raise ValueError("eps_ladder needs exactly three values")
    f1, f2, f3 = (1.0 / g for g in _ladder_eval(mu.cauchy, x, eps))
    val, err = _richardson(f1, f2, f3)
    _check_ladder(f1, f2, f3, val, err, tol)
    return BoundaryValue(val, err)


def _check_ladder(g1, g2, g3, val, err, tol):
    if not (np.all(np.isfinite(val)) and np.all(np.isfinite(err))):
        raise BoundaryError("boundary ladder produced non-finite values")
    d1 = np.abs(g2 - g1)
    d2 = np.abs(g3 - g2)
    scale = np.maximum(1.0, np.abs(val))
    bad = d2 > 0.75 * d1 + 1e-10 * scale
    if np.any(bad):
        raise BoundaryError("boundary ladder is not converging")
    if tol is not None and np.any(err > tol * scale):
        raise BoundaryError(f"boundary error estimate {float(np.max(err)):.3g} exceeds {tol:g}")


def stieltjes_invert(G: Callable, grid, eps_ladder=DEFAULT_EPS_LADDER) -> GridDensity:
    """Recover a density from its Cauchy transform.

    ``density(x) = -(1/pi) lim Im G(x + i eps)`` extrapolated over the
    ladder.  Values down to ``-1e-8`` are clipped to zero.
    """
    grid = np.asarray(grid, dtype=float)
    d = [-np.imag(g) / np.pi for g in _ladder_eval(G, grid, eps_ladder)]
    val = 2.0 * d[2] - d[1]
    if np.any(val < -_NEG_DENSITY_TOL):
        raise InversionError(f"negative extrapolated density {float(val.min()):.3g}")
    return GridDensity(grid, np.clip(val, 0.0, None))


def mellin_moment(mu, gamma: float) -> float:
    """``int x^gamma dmu`` for a measure on ``[0, inf)``.

    Known laws use their closed form when available and otherwise adaptive
    quadrature of the density; a value above ``1e12`` that keeps growing as
    the integration range widens is reported as divergent.
    """
    m = getattr(mu, "mellin", None)
    if m is not None:
        try:
            return float(m(gamma))
        except NotImplementedError:
            pass
    if isinstance(mu, KnownLaw):
        return _quad_mellin(mu, gamma)
    raise DomainError(f"cannot compute Mellin moments of {mu!r}")


def _quad_mellin(law: KnownLaw, gamma: float) -> float:
    from scipy import integrate

    lo, hi = law.support
    lo = max(lo, 0.0)

    def f(x):
        return float(law.density(np.array([x]))[0]) * x ** gamma

    vals = []
    for k in range(1, 6):
        a = lo if lo > 0 else 10.0 ** (-4 * k)
        b = hi if math.isfinite(hi) else 10.0 ** (2 * k)
        # split at 1 to help the integrator with both endpoint behaviours
        pts = [p for p in (1.0,) if a < p < b]
        v = integrate.quad(f, a, b, points=pts or None, limit=400)[0]
        vals.append(v)
        if lo > 0 and math.isfinite(hi):
            break
    last = vals[-1]
    if last > 1e12 and len(vals) > 1 and vals[-1] > vals[-2]:
        raise DivergenceError(f"Mellin moment of order {gamma} appears infinite")
    return last


def sup_density_distance(p: GridDensity, q: GridDensity, K) -> float:
    """Maximum of ``|p - q|`` over ``K`` after linear interpolation."""
    a, b = float(K[0]), float(K[1])
    if a > b:
        raise DomainError("interval K must satisfy K[0] <= K[1]")
    for d in (p, q):
        if d.grid[0] > a or d.grid[-1] < b:
            raise DomainError(f"grid [{d.grid[0]}, {d.grid[-1]}] does not cover K=[{a}, {b}]")
    pts = np.concatenate(([a, b], p.grid, q.grid))
    pts = np.unique(pts[(pts >= a) & (pts <= b)])
    return float(np.max(np.abs(p.density(pts) - q.density(pts))))


def write_density_csv(density: GridDensity, path) -> None:
    """Write ``x,density`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "density"])
        for xv, dv in zip(density.grid, density.values):
            w.writerow([fmt17(xv), fmt17(dv)])
