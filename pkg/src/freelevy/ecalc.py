"""Calculus on maps ``eta(x) = x exp(-u(x))`` of the negative half-line.

A map is stored through ``u = log(x / eta(x))``, which is real and
non-increasing on ``(-inf, 0)`` for every map of the class.  In terms of
``u`` the two convolution powers are

* Boolean power ``s``:  ``u -> s u``;
* free power ``t >= 1``: ``eta^{[t]} = eta o omega_t`` where ``omega_t``
  inverts ``Phi_t(w) = w exp((t - 1) u(w))``.

Everything else (the Boolean-to-free map, the embedding semigroup, the
complex extension near one) is built from those two operations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ClassError, ContinuationError, DomainError, InversionError
from .measures import eta_transform
from .laws import v_function_of

__all__ = [
    "EClassMap",
    "SubordinationResult",
    "CHECK_GRID",
    "from_probability_measure",
    "from_v_function",
    "boolean_power",
    "free_power",
    "free_power_map",
    "subordination",
    "bp_map",
    "semigroup_at",
    "solve_log_omega",
    "complex_free_power_near_one",
    "adaptive_continuation",
]

# 256-point log grid on (-1e4, -1e-4) used for the class-membership check
CHECK_GRID = -np.logspace(-4.0, 4.0, 256)
_MAX_BRACKET = 1000.0 * math.log(10.0)


def _principal_log_omega(z):
    """Log with the argument in ``(-3 pi / 2, pi / 2]``.

    The cut sits on the positive imaginary axis, outside the domain
    ``{Re z < 0} u {Im z < 0}`` where the continuation lives, so the log is
    continuous there and real-valued differences stay continuous too.
    """
    z = np.asarray(z, dtype=complex)
    lg = np.log(z)
    return np.where(lg.imag > 0.5 * np.pi, lg - 2j * np.pi, lg)


@dataclass(frozen=True)
class EClassMap:
    """Map ``eta(x) = x exp(-u(x))`` on the negative half-line.

    Parameters
    ----------
    u : callable
        Real, non-increasing function on ``(-inf, 0)``; must accept arrays.
    complex_u : callable, optional
        Analytic extension of ``u`` to ``{Re z < 0} u {Im z < 0}``.
    name : str
        Label used in error messages.
    """

    u: Callable
    complex_u: Optional[Callable] = None
    name: str = "eta"

    def __call__(self, x):
        return self.eta(x)

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x >= 0):
            raise DomainError("eta maps are defined on (-inf, 0)")
        return x * np.exp(-np.asarray(self.u(x), dtype=float))

    def check_membership(self, grid=CHECK_GRID, rtol: float = 1e-9) -> None:
        """Raise :class:`ClassError` unless ``u`` is non-increasing on ``grid``."""
        g = np.sort(np.asarray(grid, dtype=float))
        uv = np.asarray(self.u(g), dtype=float)
        if not np.all(np.isfinite(uv)):
            raise ClassError(f"{self.name}: u is not finite on the check grid")
        jumps = np.diff(uv)
        allow = rtol * np.maximum(1.0, np.abs(uv[1:]))
        if np.any(jumps > allow):
            k = int(np.argmax(jumps - allow))
            raise ClassError(f"{self.name}: u increases between x={g[k]:.4g} and x={g[k + 1]:.4g}")


@dataclass(frozen=True)
class SubordinationResult:
    """Inverse ``omega_t`` of ``Phi_t`` with its fixed-point residual."""

    omega: Callable
    t: float
    residual: float = field(default=0.0)


# -------------------------------------------------------------- constructors

def from_probability_measure(mu, name: str = "eta_mu") -> EClassMap:
    """Map of a probability measure on ``[0, inf)`` through its eta-transform.

    ``u(x) = log(x / eta_mu(x))``; the complex extension uses the principal
    log of the same ratio.
    """
    if _is_delta_zero(mu):
        raise DomainError("the point mass at 0 has eta identically 0")

    def u(x):
        x = np.asarray(x, dtype=float)
        eta = np.real(np.asarray(eta_transform(mu, x + 0j)))
        return np.log(x / eta)

    def cu(z):
        z = np.asarray(z, dtype=complex)
        return np.log(z / np.asarray(eta_transform(mu, z)))

    return EClassMap(u, cu, name)


def _is_delta_zero(mu) -> bool:
    loc = getattr(mu, "locations", None)
    if loc is not None and getattr(mu, "part", None) is None:
        return len(loc) == 1 and float(loc[0]) == 0.0
    atomic = getattr(mu, "atomic", None)
    if atomic is not None:
        return _is_delta_zero(atomic)
    return False


def from_v_function(law, name: str | None = None) -> EClassMap:
    """Bercovici-Pata pre-image ``eta(x) = x exp(-v(x))`` of a law with Sigma = e^v."""
    v_function_of(law, -1.0 + 0j)  # raises for laws that are not infinitely divisible

    def u(x):
        x = np.asarray(x, dtype=float)
        return np.real(np.asarray(v_function_of(law, x + 0j)))

    def cu(z):
        return np.asarray(v_function_of(law, np.asarray(z, dtype=complex)))

    return EClassMap(u, cu, name or f"v[{law.name}]")


def from_samples(x, u_values, name: str = "spline") -> EClassMap:
    """Monotone cubic interpolant of ``u`` in the variable ``log(-x)``."""
    from scipy.interpolate import PchipInterpolator

    x = np.asarray(x, dtype=float)
    order = np.argsort(np.log(-x))
    spline = PchipInterpolator(np.log(-x)[order], np.asarray(u_values, dtype=float)[order],
                               extrapolate=True)
    return EClassMap(lambda q: spline(np.log(-np.asarray(q, dtype=float))), None, name)


# ---------------------------------------------------------------- operations

def boolean_power(eta: EClassMap, s: float, check: bool = True) -> EClassMap:
    """Multiplicative Boolean power: ``u -> s u``."""
    if s < 0:
        raise DomainError("Boolean power needs s >= 0")
    s = float(s)
    cu = None
    if eta.complex_u is not None:
        def cu(z, _c=eta.complex_u):
            return s * np.asarray(_c(z))
    out = EClassMap(lambda x, _u=eta.u: s * np.asarray(_u(x), dtype=float), cu, f"{eta.name}^b{s:g}")
    if check:
        out.check_membership()
    return out


def _invert_phi(eta: EClassMap, t: float, x):
    """Solve ``w exp((t-1) u(w)) = x`` for ``w < 0``; vectorised over ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x >= 0):
        raise DomainError("free power is defined on (-inf, 0)")
    if t == 1.0:
        return x.copy()
    target = np.log(-x)
    tm1 = t - 1.0

    def g(y):
        return y + tm1 * np.asarray(eta.u(-np.exp(y)), dtype=float) - target

    y0 = target.copy()
    g0 = g(y0)
    hi = y0.copy()
    # geometric bracket expansion away from y0
    step = np.ones_like(y0)
    need_lo = g0 > 0
    need_hi = g0 < 0
    lo = y0.copy()
    while np.any(need_lo):
        lo = np.where(need_lo, y0 - step, lo)
        gl = g(lo)
        need_lo = need_lo & (gl > 0)
        step = np.where(need_lo, 2.0 * step, step)
        if np.any(step[need_lo] > _MAX_BRACKET):
            raise InversionError("bracket for Phi_t inversion exceeded 1000 decades")
    step = np.ones_like(y0)
    while np.any(need_hi):
        hi = np.where(need_hi, y0 + step, hi)
        gh = g(hi)
        need_hi = need_hi & (gh < 0)
        step = np.where(need_hi, 2.0 * step, step)
        if np.any(step[need_hi] > _MAX_BRACKET):
            raise InversionError("bracket for Phi_t inversion exceeded 1000 decades")
    for _ in range(80):
        # further halving cannot move the midpoint once the bracket is at rounding level
        if np.all(hi - lo <= 4.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(lo))):
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        go_up = gm < 0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    y = 0.5 * (lo + hi)
    # Newton polish, kept inside the bracket
    for _ in range(3):
        gy = g(y)
        h = 1e-6 * np.maximum(1.0, np.abs(y))
        dg = (g(y + h) - g(y - h)) / (2.0 * h)
        with np.errstate(divide="ignore", invalid="ignore"):
            ynew = y - gy / dg
        ok = np.isfinite(ynew) & (ynew >= lo) & (ynew <= hi) & (np.abs(g(ynew)) <= np.abs(gy))
        y = np.where(ok, ynew, y)
    return -np.exp(y)


def free_power(eta: EClassMap, t: float, x):
    """Value of the free power ``eta^{[t]}(x) = eta(omega_t(x))`` for ``t >= 1``.

    Parameters
    ----------
    eta : EClassMap
    t : float
        Power, ``t >= 1``.
    x : float or array_like
        Points of ``(-inf, 0)``.

    Returns
    -------
    float or ndarray
    """
    if t < 1:
        raise DomainError("free power is defined here for t >= 1")
    scalar = np.ndim(x) == 0
    w = _invert_phi(eta, float(t), x)
    out = eta.eta(w)
    return float(out[0]) if scalar else out


def free_power_map(eta: EClassMap, t: float, check: bool = True) -> EClassMap:
    """Free power as a map; ``u_t(x) = log(x / omega_t(x)) + u(omega_t(x))``."""
    if t < 1:
        raise DomainError("free power is defined here for t >= 1")
    t = float(t)
    if t == 1.0:
        return eta

    def u_t(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        w = _invert_phi(eta, t, x)
        return np.log(x / w) + np.asarray(eta.u(w), dtype=float)

    cu = None
    if eta.complex_u is not None:
        def cu(z, _eta=eta):
            # complex omega_t via the continuation solver with power t - 1
            z = np.asarray(z, dtype=complex)
            lw = _principal_log_omega(z)
            ell = solve_log_omega(_eta.complex_u, t - 1.0, lw)
            return (lw - ell) + np.asarray(_eta.complex_u(np.exp(ell)))

    out = EClassMap(u_t, cu, f"{eta.name}^f{t:g}")
    if check:
        out.check_membership()
    return out


def subordination(eta: EClassMap, t: float, grid=CHECK_GRID) -> SubordinationResult:
    """Subordination function ``omega_t`` with its residual on ``grid``."""
    if t < 1:
        raise DomainError("subordination is defined here for t >= 1")
    t = float(t)
    grid = np.asarray(grid, dtype=float)
    w = _invert_phi(eta, t, grid)
    phi = w * np.exp((t - 1.0) * np.asarray(eta.u(w), dtype=float))
    residual = float(np.max(np.abs(phi - grid) / np.abs(grid)))

    def omega(x):
        scalar = np.ndim(x) == 0
        out = _invert_phi(eta, t, x)
        return float(out[0]) if scalar else out

    return SubordinationResult(omega, t, residual)


def bp_map(eta: EClassMap) -> EClassMap:
    """Boolean-to-free map: the Boolean half-power of the free square."""
    return boolean_power(free_power_map(eta, 2.0), 0.5)


def semigroup_at(eta: EClassMap, t: float) -> EClassMap:
    """Time-t map ``(eta^{[1+t]})^{b t/(1+t)}`` of the semigroup through ``bp_map(eta)``."""
    if t <= 0:
        raise DomainError("semigroup time must be positive")
    t = float(t)
    return boolean_power(free_power_map(eta, 1.0 + t), t / (1.0 + t))


# ------------------------------------------------------ complex continuation

def _newton_log(cu, t, lw, ell0, max_iter=50, tol=1e-13):
    ell = np.array(ell0, dtype=complex, copy=True)
    done = np.zeros(ell.shape, dtype=bool)
    for _ in range(max_iter):
        om = np.exp(ell)
        uu = np.asarray(cu(om), dtype=complex)
        res = ell + t * uu - lw
        h = 1e-7 * np.maximum(1.0, np.abs(om))
        du = (np.asarray(cu(om + h), dtype=complex) - np.asarray(cu(om - h), dtype=complex)) / (2.0 * h)
        deriv = 1.0 + t * om * du
        with np.errstate(divide="ignore", invalid="ignore"):
            step = res / deriv
        step = np.where(np.isfinite(step), step, 0.0)
        step = np.where(done, 0.0, step)
        new = ell - step
        # damp steps leaving the strip -3pi/2 < Im <= 0, the image of the domain
        for _k in range(30):
            bad = (new.imag > 0.0) | (new.imag <= -1.5 * np.pi)
            if not np.any(bad):
                break
            step = np.where(bad, 0.5 * step, step)
            new = ell - step
        ell = new
        conv = np.abs(step) <= tol * np.maximum(1.0, np.abs(ell))
        done = done | conv
        if np.all(done):
            return ell, True
    return ell, bool(np.all(done))


def solve_log_omega(complex_u, t: float, log_w, ell0=None, max_doublings: int = 8):
    """Solve ``Log omega + t u(omega) = log_w`` for ``ell = Log omega``.

    Newton starts from ``log_w`` (exact when ``t = 0``).  Points that fail to
    converge within 50 iterations are re-solved by continuation in ``t``
    from 0 with progressively finer steps.

    Raises
    ------
    ContinuationError
        If no step count up to ``2 ** max_doublings`` converges.
    """
    lw = np.asarray(log_w, dtype=complex)
    scalar = lw.ndim == 0
    lw = np.atleast_1d(lw)
    start = lw.copy() if ell0 is None else np.atleast_1d(np.asarray(ell0, dtype=complex))
    if t == 0:
        return lw[0] if scalar else lw
    ell, ok = _newton_log(complex_u, t, lw, start)
    if not ok:
        for k in range(1, max_doublings + 1):
            n = 2 ** k
            cur = lw.copy()
            good = True
            for j in range(1, n + 1):
                cur, good = _newton_log(complex_u, t * j / n, lw, cur)
                if not good:
                    break
            if good:
                ell, ok = cur, True
                break
    if not ok:
        raise ContinuationError(f"complex Newton continuation failed at t={t:g}")
    return ell[0] if scalar else ell


def complex_free_power_near_one(eta: EClassMap, t: float, z):
    """``(eta^{[1+t]})^{b 1/(1+t)}(z)`` for ``z`` with ``Re z < 0`` or ``Im z < 0``.

    The complex subordination point ``omega`` solves
    ``omega exp(t u(omega)) = z``; the value is ``z exp(-u(omega))`` with the
    branch of ``u`` carried continuously along the Newton path.
    """
    if eta.complex_u is None:
        raise DomainError("this map has no complex extension")
    if t < 0:
        raise DomainError("t must be non-negative")
    z = np.asarray(z, dtype=complex)
    if np.any((z.real >= 0) & (z.imag >= 0)):
        raise DomainError("z must satisfy Re z < 0 or Im z < 0")
    lw = _principal_log_omega(z)
    ell = solve_log_omega(eta.complex_u, float(t), lw)
    out = z * np.exp(-np.asarray(eta.complex_u(np.exp(ell))))
    return out if out.ndim else complex(out)


def adaptive_continuation(eta: EClassMap, t: float, z, min_t: float = 1e-12):
    """Halve ``t`` until the continuation converges at every point of ``z``.

    Returns
    -------
    (values, achieved_t)
    """
    cur = float(t)
    while cur >= min_t:
        try:
            return complex_free_power_near_one(eta, cur, z), cur
        except ContinuationError:
            cur *= 0.5
    raise ContinuationError(f"continuation failed for every t down to {min_t:g}")
