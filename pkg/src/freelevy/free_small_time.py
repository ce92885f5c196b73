"""Densities of multiplicative free powers and their small- and large-time limits.

For a law with ``Sigma = exp(v)`` let ``eta(x) = x exp(-v(x))``.  The
eta-transform of ``mu^{[t]}`` (free multiplicative power) is
``z exp(-t v(omega))`` where ``omega`` solves ``omega exp(t v(omega)) = z``
(the key identity of the eta-calculus, see :mod:`freelevy.ecalc`).  Hence

    F_{mu^{[t]}}(z) = z - exp(-t v(omega(1/z))),

and the density of ``X^p``, ``X ~ mu^{[t]}``, follows by Stieltjes inversion
at ``z = x^s (1 + i eps)`` with ``s = 1/p``.  Everything is carried in
logarithmic variables so that ``x^s`` never has to be formed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .ecalc import EClassMap, from_v_function, solve_log_omega
from .errors import DomainError, HypothesisError, InversionError
from .laws import boolean_stable_boxtimes_power, log_cauchy_density, s_transform_of
from .measures import DEFAULT_EPS_LADDER, AtomicMeasure, GridDensity

__all__ = [
    "free_power_density",
    "free_power_density_values",
    "exact_boolean_stable_power_density",
    "log_cauchy_free_parameters",
    "log_cauchy_free_limit_check",
    "TucciLimit",
    "tucci_limit",
    "tucci_convergence_check",
    "FreeLimitTable",
    "write_summary_json",
]

GRID_SIZE = 512
TUCCI_POINTS = 1024


def _cexpm1(z):
    a, b = z.real, z.imag
    return (np.expm1(a) * np.cos(b) - 2.0 * np.sin(0.5 * b) ** 2) + 1j * np.exp(a) * np.sin(b)


def _as_eclass(law) -> EClassMap:
    if isinstance(law, EClassMap):
        if law.complex_u is None:
            raise DomainError("the map needs a complex extension")
        return law
    return from_v_function(law)


def free_power_density_values(law, t: float, exponent: float, x, eps_ladder=DEFAULT_EPS_LADDER):
    """Density of ``(mu^{[t]})^exponent`` at the points ``x > 0``.

    Parameters
    ----------
    law : KnownLaw with ``v`` or EClassMap
        Either a law that is infinitely divisible for multiplicative free
        convolution, or directly the map ``x exp(-v(x))``.
    t : float
        Time, ``t > 0``.
    exponent : float
        Push-forward exponent ``p > 0``.
    x : array_like
    eps_ladder : sequence of three floats
        Relative offsets ``eps`` in ``z = x^s (1 + i eps min(1, s))``,
        combined by one Richardson step (the raw smallest-eps value is kept
        where the extrapolant would be negative).

    Returns
    -------
    ndarray
    """
    if t <= 0 or exponent <= 0:
        raise DomainError("need t > 0 and exponent > 0")
    eta = _as_eclass(law)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("density points must be positive")
    s = 1.0 / float(exponent)
    slx = s * np.log(x)
    scale = min(1.0, s)
    d = []
    ell = None
    for eps in eps_ladder:
        e = eps * scale
        lw = -slx - np.log1p(1j * e)
        ell = solve_log_omega(eta.complex_u, float(t), lw, ell0=ell)
        E = -t * np.asarray(eta.complex_u(np.exp(ell))) - slx
        # (1 + i e) - exp(E) without cancellation
        den = 1j * e - _cexpm1(E)
        d.append(-(s / (np.pi * x)) * np.imag(1.0 / den))
    val = 2.0 * d[2] - d[1]
    # at square-root edges the ladder is not linear in eps and the
    # extrapolant overshoots below zero; keep the smallest-eps value there
    val = np.where(val < 0, d[2], val)
    if np.any(val < -1e-8 * max(1.0, float(np.max(np.abs(val))))):
        raise InversionError(f"negative density {float(val.min()):.3g}")
    return np.clip(val, 0.0, None)


def free_power_density(law, t: float, exponent: float, K, grid_size: int = GRID_SIZE,
                       log_grid: bool = False, eps_ladder=DEFAULT_EPS_LADDER) -> GridDensity:
    """Density of ``(mu^{[t]})^exponent`` on a grid over ``K``."""
    a, b = float(K[0]), float(K[1])
    if not (0.0 < a < b < math.inf):
        raise DomainError("K must be a compact interval in (0, inf)")
    x = np.geomspace(a, b, grid_size) if log_grid else np.linspace(a, b, grid_size)
    vals = free_power_density_values(law, t, exponent, x, eps_ladder)
    trap = float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(x)))
    if trap > 1.0:
        # interpolation overshoot on a coarse grid; the values are still point values
        vals = vals / trap
    return GridDensity(x, vals)


def exact_boolean_stable_power_density(alpha: float, t: float, exponent: float, x):
    """Density of ``(b_alpha^{[t]})^exponent`` from the closed-form ``b_{alpha'}``."""
    law = boolean_stable_boxtimes_power(alpha, t)
    x = np.asarray(x, dtype=float)
    s = 1.0 / float(exponent)
    y = np.exp(s * np.log(x))
    return s * np.exp((s - 1.0) * np.log(x)) * np.asarray(law.density(y))


# ------------------------------------------------------------ log-Cauchy limit

def log_cauchy_free_parameters(law, eps_ladder=(1e-4, 5e-5, 2.5e-5)):
    """``(beta, gamma)`` from ``-beta + i gamma = v(1 - i0)``.

    The boundary value is estimated along ``1 - i eps`` with one Richardson
    step.

    Raises
    ------
    HypothesisError
        If the ladder does not settle or the limit is not in the upper
        half-plane.
    """
    eta = _as_eclass(law)
    vals = [complex(np.asarray(eta.complex_u(np.array([1.0 - 1j * e])))[0]) for e in eps_ladder]
    if not all(np.isfinite(v) for v in vals):
        raise HypothesisError("v is not finite near 1")
    d1, d2 = abs(vals[1] - vals[0]), abs(vals[2] - vals[1])
    if d2 > 0.75 * d1 + 1e-9 * max(1.0, abs(vals[2])):
        raise HypothesisError("v has no continuous boundary value at 1")
    v1 = 2.0 * vals[2] - vals[1]
    if not (v1.imag > 0):
        raise HypothesisError(f"v(1) = {v1:.6g} is not in the upper half-plane")
    return -v1.real, v1.imag


@dataclass(frozen=True)
class FreeLimitTable:
    t: tuple
    distance: tuple
    params: dict = field(default_factory=dict)

    @property
    def decreasing(self) -> bool:
        """True when the distance shrinks along the approach to the limit."""
        d = np.asarray(self.distance)
        return bool(np.all(np.diff(d) < 0))

    def as_dict(self) -> dict:
        return {"t": list(self.t), "sup_distance": list(self.distance), **self.params}


def log_cauchy_free_limit_check(law, t_list, K, grid_size: int = GRID_SIZE) -> FreeLimitTable:
    """Sup distance of ``(mu^{[t]})^{1/t}`` to its log-Cauchy limit.

    ``t_list`` is taken in the given order; ``decreasing`` on the result
    reports whether the distance shrinks along it.
    """
    beta, gamma = log_cauchy_free_parameters(law)
    x = np.linspace(K[0], K[1], grid_size)
    limit = log_cauchy_density(beta, gamma, x)
    dist = []
    for t in t_list:
        vals = free_power_density_values(law, float(t), 1.0 / float(t), x)
        dist.append(float(np.max(np.abs(vals - limit))))
    return FreeLimitTable(tuple(float(t) for t in t_list), tuple(dist), {"beta": beta, "gamma": gamma})


# ------------------------------------------------------------------- Tucci

@dataclass(frozen=True)
class TucciLimit:
    """Limit law of ``(mu^{[t]})^{1/t}`` as ``t -> inf``.

    ``quantile_x`` and ``quantile_y`` tabulate ``CDF(quantile_y) = quantile_x``.
    ``density`` is a :class:`GridDensity` or, for a degenerate limit,
    ``atom`` holds the point mass.
    """

    quantile_x: np.ndarray
    quantile_y: np.ndarray
    density: GridDensity | None
    atom: AtomicMeasure | None = None

    def cdf(self, y):
        return np.interp(y, self.quantile_y, self.quantile_x, left=0.0, right=1.0)

    @property
    def support(self):
        return (float(self.quantile_y[0]), float(self.quantile_y[-1]))


def tucci_limit(law, n: int = TUCCI_POINTS, atom_at_zero: float = 0.0) -> TucciLimit:
    """Quantile construction ``CDF(1 / S(x - 1)) = x`` of the large-time limit.

    The density is obtained by central differences of the quantile function
    on ``n`` points of ``(atom_at_zero, 1)`` and renormalised to mass one.
    """
    lo = float(atom_at_zero)
    if not (0.0 <= lo < 1.0):
        raise DomainError("atom_at_zero must lie in [0, 1)")
    x = lo + (1.0 - lo) * (np.arange(n) + 0.5) / n
    S = np.real(np.asarray(s_transform_of(law, x - 1.0 + 0j), dtype=complex))
    if np.any(S <= 0) or not np.all(np.isfinite(S)):
        raise DomainError("S-transform must be positive and finite on (-1, 0)")
    y = 1.0 / S
    spread = float(np.max(y) - np.min(y))
    if spread <= 1e-12 * max(1.0, float(np.max(np.abs(y)))):
        return TucciLimit(x, y, None, AtomicMeasure([float(np.mean(y))], [1.0]))
    dy = np.gradient(y, x)
    if np.any(dy <= 0):
        raise InversionError("1/S(x - 1) is not increasing; the quantile construction fails")
    dens = 1.0 / dy
    mass = float(np.sum(0.5 * (dens[1:] + dens[:-1]) * np.diff(y)))
    return TucciLimit(x, y, GridDensity(y, dens / mass))


def tucci_convergence_check(law, t_list, K=(0.05, 0.95), grid_size: int = GRID_SIZE) -> FreeLimitTable:
    """Sup distance on ``K`` between ``(mu^{[t]})^{1/t}`` and the quantile limit."""
    lim = tucci_limit(law)
    x = np.linspace(K[0], K[1], grid_size)
    if lim.density is None:
        raise DomainError("degenerate limit: compare atoms instead of densities")
    target = lim.density.density(x)
    dist = []
    for t in t_list:
        vals = free_power_density_values(law, float(t), 1.0 / float(t), x)
        dist.append(float(np.max(np.abs(vals - target))))
    return FreeLimitTable(tuple(float(t) for t in t_list), tuple(dist), {"K": list(K)})


def write_summary_json(tables: dict, path) -> None:
    """JSON summary of several limit tables, keyed by experiment name."""
    out = {k: (v.as_dict() if hasattr(v, "as_dict") else v) for k, v in tables.items()}
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
