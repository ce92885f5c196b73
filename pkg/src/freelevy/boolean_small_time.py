"""Boolean convolution powers of laws on [0, inf) and their small-time limits.

The multiplicative Boolean power ``mu^{b t}`` of a law on ``[0, inf)`` has

    G_t(z) = 1 / (z - (z - F(z))^t),

and the density of its push-forward under ``x -> x^p`` follows from Stieltjes
inversion on the boundary.  With ``s = 1/p`` the density at ``x`` is

    (s / (pi x)) Im[ 1 / (x^{-s} (x^s - F(x^s + i0))^t - 1) ],

evaluated here as ``1 / expm1(t L - s log x)`` with ``L = Log(x^s - F)`` so
that nothing overflows when ``s`` is tiny or ``p`` is huge.

Additive Boolean powers (``F_t = (1 - t) z + t F``) are included for the
strict-stability check of Boolean stable laws.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisError, PoleError
from .laws import CuspLaw, log_boolean_stable_density, log_cauchy_density
from .measures import GridDensity, boundary_F, f_transform, fmt17

__all__ = [
    "BooleanPowerDensityRequest",
    "LimitTable",
    "boolean_power_cauchy",
    "boolean_power_eta",
    "boolean_power_density",
    "additive_boolean_power_F",
    "additive_boolean_power_density",
    "log_cauchy_parameters",
    "log_cauchy_limit_check",
    "log_boolean_stable_limit_check",
    "write_distance_csv",
    "write_overlay_csv",
]

GRID_SIZE = 512


def _log_lower(u):
    # principal log, except negative reals are read as u - i0 (argument -pi)
    u = np.asarray(u, dtype=complex)
    out = np.log(u)
    flip = (u.imag == 0) & (u.real < 0)
    return np.where(flip, out.real - 1j * np.pi, out)


def _clog1p_lower(u):
    u = np.asarray(u, dtype=complex)
    w = 1.0 + u
    d = w - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(d == 0, u, np.log(w) * (u / np.where(d == 0, 1.0, d)))
    flip = (w.imag == 0) & (w.real < 0)
    return np.where(flip, np.log(np.abs(w.real)) - 1j * np.pi, out)


def _cexpm1(z):
    # exp(z) - 1 without cancellation for small |z|
    z = np.asarray(z, dtype=complex)
    a, b = z.real, z.imag
    re = np.expm1(a) * np.cos(b) - 2.0 * np.sin(0.5 * b) ** 2
    im = np.exp(a) * np.sin(b)
    return re + 1j * im


@dataclass(frozen=True)
class BooleanPowerDensityRequest:
    """Density of ``(mu^{b t})^p`` on ``K``.

    Parameters
    ----------
    mu : measure or law on ``[0, inf)``
    t : float
        Boolean power in ``(0, 1]``.
    exponent : float
        Push-forward exponent ``p > 0``; the law is that of ``X^p``.
    K : (float, float)
        Compact interval in ``(0, inf)``.
    grid_size : int
    """

    mu: object
    t: float
    exponent: float
    K: tuple
    grid_size: int = GRID_SIZE

    def __post_init__(self):
        if not (0.0 < self.t <= 1.0):
            raise DomainError("Boolean power t must lie in (0, 1]")
        if not self.exponent > 0:
            raise DomainError("push-forward exponent must be positive")
        a, b = self.K
        if not (0.0 < a < b < math.inf):
            raise DomainError("K must be a compact interval in (0, inf)")
        if int(self.grid_size) != self.grid_size or self.grid_size < 2:
            raise DomainError("grid_size must be an integer >= 2")


def boolean_power_cauchy(mu, t: float, z):
    """Cauchy transform ``1 / (z - (z - F(z))^t)`` of the multiplicative Boolean power."""
    if not (0.0 <= t <= 1.0):
        raise DomainError("t must lie in [0, 1]")
    z = np.asarray(z, dtype=complex)
    if t == 0.0:
        den = z - 1.0
    else:
        F = np.asarray(f_transform(mu, z), dtype=complex)
        den = z - np.exp(t * _log_lower(z - F))
    if np.any(np.abs(den) < 1e-300):
        raise PoleError("Boolean power Cauchy transform has a pole here")
    out = 1.0 / den
    return out if out.ndim else complex(out)


def boolean_power_eta(mu, t: float, z):
    """``eta`` of the multiplicative Boolean power computed from its Cauchy transform."""
    z = np.asarray(z, dtype=complex)
    g = np.asarray(boolean_power_cauchy(mu, t, 1.0 / z))
    out = 1.0 - z / g
    return out if out.ndim else complex(out)


def _log_gap(mu, s, logx):
    """``Log(x^s - F(x^s + i0))`` on the lower branch."""
    offset = getattr(mu, "boundary_cauchy_offset", None)
    if offset is not None:
        # laws centred at 1: work with w = x^s - 1 to keep digits near 1
        w = np.expm1(s * logx)
        F = 1.0 / np.asarray(offset(w), dtype=complex)
        return _clog1p_lower(w - F)
    z = np.exp(s * logx)
    F = np.asarray(boundary_F(mu, z).value, dtype=complex)
    return _log_lower(z - F)


def boolean_power_density(req: BooleanPowerDensityRequest) -> GridDensity:
    """Density of ``(mu^{b t})^p`` on a linear grid over ``K``.

    Boundary values of ``F`` come from :func:`measures.boundary_F`
    (exact for laws with closed-form Cauchy transforms).
    """
    x = np.linspace(req.K[0], req.K[1], int(req.grid_size))
    return GridDensity(x, _density_values(req.mu, req.t, 1.0 / req.exponent, x), mass=None)


def _density_values(mu, t, s, x):
    logx = np.log(x)
    L = _log_gap(mu, s, logx)
    D = _cexpm1(t * L - s * logx)
    if np.any(np.abs(D) < 1e-300):
        raise PoleError("density formula hits a pole on the grid")
    vals = (s / (np.pi * x)) * np.imag(1.0 / D)
    # round-off can leave -1e-17 where the density vanishes
    return np.where(np.abs(vals) < 1e-14 * max(1.0, float(np.max(np.abs(vals)))), 0.0, vals).clip(min=0.0)


# ----------------------------------------------------------- additive Boolean

def additive_boolean_power_F(mu, t: float, z):
    """``F`` of the additive Boolean power: ``(1 - t) z + t F(z)``."""
    if t < 0:
        raise DomainError("additive Boolean power needs t >= 0")
    z = np.asarray(z, dtype=complex)
    F = getattr(mu, "F", None)
    Fz = np.asarray(F(z) if F is not None else f_transform(mu, z), dtype=complex)
    out = (1.0 - t) * z + t * Fz
    return out if out.ndim else complex(out)


def additive_boolean_power_density(mu, t: float, x):
    """Density of the additive Boolean power at real ``x`` from ``F(x + i0)``."""
    x = np.asarray(x, dtype=float)
    F = getattr(mu, "F", None)
    Fx = np.asarray(F(x + 0j) if F is not None else boundary_F(mu, x).value, dtype=complex)
    Ft = (1.0 - t) * x + t * Fx
    return -np.imag(1.0 / Ft) / np.pi


# ---------------------------------------------------------------- limits

@dataclass(frozen=True)
class LimitTable:
    """Sup distances to a limit density along a list of times."""

    t: tuple
    distance: tuple
    params: dict

    @property
    def decreasing(self) -> bool:
        """True when the distance shrinks as t decreases."""
        order = np.argsort(self.t)
        d = np.asarray(self.distance)[order]
        return bool(np.all(np.diff(d) > 0))


def log_cauchy_parameters(mu):
    """``(beta, gamma)`` with ``beta - i gamma = Log(1 - F(1) - i0)``.

    Raises
    ------
    HypothesisError
        Unless ``F(1 + i0)`` lies in the upper half-plane or in ``(1, inf)``.
    """
    F1 = complex(np.asarray(boundary_F(mu, np.array([1.0])).value)[0])
    if not (F1.imag > 0 or (F1.imag == 0 and F1.real > 1.0)):
        raise HypothesisError(f"F(1) = {F1:.6g} is neither in the upper half-plane nor in (1, inf)")
    L = complex(_log_lower(1.0 - F1))
    return L.real, -L.imag


def log_cauchy_limit_check(mu, t_list, K, grid_size: int = GRID_SIZE) -> LimitTable:
    """Distance between ``(mu^{b t})^{1/t}`` and its log-Cauchy limit for each t."""
    beta, gamma = log_cauchy_parameters(mu)
    x = np.linspace(K[0], K[1], grid_size)
    limit = log_cauchy_density(beta, gamma, x)
    dist = []
    for t in t_list:
        vals = _density_values(mu, float(t), float(t), x)
        dist.append(float(np.max(np.abs(vals - limit))))
    return LimitTable(tuple(float(t) for t in t_list), tuple(dist), {"beta": beta, "gamma": gamma})


def log_boolean_stable_limit_check(alpha: float, K_plus, K_minus, t_list,
                                   grid_size: int = GRID_SIZE) -> LimitTable:
    """Distance between ``(mu^{b t})^{t^{-1/alpha}}`` and the log Boolean stable law.

    ``mu`` is the law with density ``(alpha/2)|x - 1|^(alpha - 1)`` on
    ``(0, 2)``, whose limit has ``rho = 1/2`` and
    ``r = 2 sin(alpha pi / 2) / (alpha pi)``.
    """
    mu = CuspLaw(alpha)
    if not (K_plus[0] > 1.0 and 0.0 < K_minus[0] and K_minus[1] < 1.0):
        raise DomainError("need K_plus inside (1, inf) and K_minus inside (0, 1)")
    x = np.concatenate([np.linspace(K_minus[0], K_minus[1], grid_size),
                        np.linspace(K_plus[0], K_plus[1], grid_size)])
    limit = log_boolean_stable_density(alpha, 0.5, mu.r, x)
    dist = []
    for t in t_list:
        s = float(t) ** (1.0 / alpha)
        vals = _density_values(mu, float(t), s, x)
        dist.append(float(np.max(np.abs(vals - limit))))
    return LimitTable(tuple(float(t) for t in t_list), tuple(dist),
                      {"alpha": alpha, "rho": 0.5, "r": mu.r})


def write_distance_csv(table: LimitTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "sup_distance"])
        for t, d in zip(table.t, table.distance):
            w.writerow([fmt17(t), fmt17(d)])


def write_overlay_csv(x, density, limit, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "density", "limit_density"])
        for row in zip(x, density, limit):
            w.writerow([fmt17(v) for v in row])
