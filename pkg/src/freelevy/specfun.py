"""Special functions used by the closed-form moment formulas.

Everything here is implemented from scratch on top of ``math``: a Lanczos
log-gamma, the Beta function with reflection for negative arguments, a real
Gauss hypergeometric series with a Pfaff transformation, and the Bessel
functions J1 and I1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "SeriesControl",
    "log_gamma",
    "log_gamma_array",
    "gamma_sign_log",
    "gamma",
    "beta",
    "hyp2f1",
    "bessel_j1",
    "bessel_i1",
]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for power series.

    Parameters
    ----------
    max_terms : int
        Hard cap on the number of terms, at least 64.
    rel_tol : float
        Stop once terms fall below ``rel_tol`` times the partial sum.
    """

    max_terms: int = 10000
    rel_tol: float = 1e-14

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 64:
            raise ValueError("max_terms must be an integer >= 64")
        if not (0.0 < self.rel_tol <= 1e-10):
            raise ValueError("rel_tol must lie in (0, 1e-10]")


DEFAULT_CONTROL = SeriesControl()


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _lanczos_log_gamma(x: float) -> float:
    # valid for x >= 0.5
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, 9):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for ``x > 0``.

    Parameters
    ----------
    x : float
        Positive, finite argument.

    Returns
    -------
    float
        ``ln Gamma(x)``.
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma needs a positive finite argument, got {x!r}")
    if x < 0.5:
        # Gamma(x) = Gamma(x + 1) / x keeps the Lanczos sum on its good range
        return _lanczos_log_gamma(x + 1.0) - math.log(x)
    return _lanczos_log_gamma(x)


def log_gamma_array(x):
    """Vectorised ``ln Gamma`` for positive arrays (same Lanczos sum)."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0.0):
        raise DomainError("log_gamma_array needs positive finite arguments")
    small = x < 0.5
    xs = np.where(small, x + 1.0, x)
    z = xs - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, 9):
        acc = acc + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)
    return np.where(small, out - np.log(x), out)


def gamma_sign_log(x: float) -> tuple[float, float]:
    """Sign and log-modulus of Gamma at any non-pole real ``x``."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"gamma needs a finite argument, got {x!r}")
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x!r}")
    if x > 0:
        return 1.0, log_gamma(x)
    # reflection: Gamma(x) Gamma(1 - x) = pi / sin(pi x)
    s = math.sin(math.pi * x)
    sign = 1.0 if s > 0 else -1.0
    return sign, math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x)


def gamma(x: float) -> float:
    sign, lg = gamma_sign_log(x)
    return sign * math.exp(lg)


def beta(p: float, q: float) -> float:
    """Beta function ``Gamma(p) Gamma(q) / Gamma(p + q)``.

    Negative non-integer arguments go through the reflection formula.
    """
    p, q = float(p), float(q)
    for v, name in ((p, "p"), (q, "q"), (p + q, "p+q")):
        if _is_nonpositive_integer(v):
            raise PoleError(f"beta pole: {name}={v!r} is a non-positive integer")
    sp, lp = gamma_sign_log(p)
    sq, lq = gamma_sign_log(q)
    spq, lpq = gamma_sign_log(p + q)
    return sp * sq * spq * math.exp(lp + lq - lpq)


# a sum whose largest term exceeds the result by this factor has lost
# more than five digits to cancellation
_CANCELLATION_LIMIT = 1e5


def _hyp2f1_series(a, b, c, z, ctl: SeriesControl) -> float:
    term = 1.0
    total = 1.0
    biggest = 1.0
    small_run = 0
    for n in range(ctl.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z
        total += term
        biggest = max(biggest, abs(term))
        if abs(term) <= ctl.rel_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        if term == 0.0 or small_run >= 3:
            if biggest > _CANCELLATION_LIMIT * abs(total):
                raise ConvergenceError(
                    f"2F1({a}, {b}; {c}; {z}): cancellation, largest term {biggest:.3g} vs sum {total:.3g}")
            return total
    raise ConvergenceError(
        f"2F1({a}, {b}; {c}; {z}) did not converge in {ctl.max_terms} terms"
    )


def hyp2f1(a: float, b: float, c: float, z: float,
           ctl: SeriesControl = DEFAULT_CONTROL, method: str = "auto") -> float:
    """Gauss hypergeometric function for real arguments.

    Parameters
    ----------
    a, b, c : float
        Parameters; ``c`` must not be a non-positive integer.
    z : float
        Argument with ``z <= 0`` or ``|z| < 1``.
    ctl : SeriesControl
        Series truncation settings.
    method : {"auto", "direct", "pfaff"}
        ``auto`` sums the series directly when ``|z| <= 0.5`` or
        ``0 < z < 1`` and otherwise maps ``z -> z / (z - 1)`` first.

    Returns
    -------
    float
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise PoleError(f"2F1 undefined for c={c!r}")
    if not math.isfinite(z) or not (z <= 0.0 or abs(z) < 1.0):
        raise DomainError(f"2F1 argument must satisfy z <= 0 or |z| < 1, got {z!r}")
    if z == 0.0:
        return 1.0
    if method == "auto":
        method = "direct" if (abs(z) <= 0.5 or z > 0.0) else "pfaff"
    if method == "direct":
        if abs(z) >= 1.0:
            raise DomainError("direct 2F1 series needs |z| < 1")
        return _hyp2f1_series(a, b, c, z, ctl)
    if method == "pfaff":
        # 2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1))
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _hyp2f1_series(a, c - b, c, w, ctl)
    raise ValueError(f"unknown method {method!r}")


def _bessel_series(x: float, sign: float) -> float:
    # sum_k sign^k (x/2)^(2k+1) / (k! (k+1)!)
    h = 0.5 * x
    q = h * h
    term = h
    total = h
    k = 0
    while True:
        k += 1
        term *= sign * q / (k * (k + 1.0))
        total += term
        if abs(term) <= 1e-17 * abs(total) or k > 500:
            return total


def _bessel_j1_miller(x: float) -> float:
    # backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1},
    # normalised by J_0 + 2 sum J_{2k} = 1
    ax = abs(x)
    start = 2 * ((int(ax) + int(12 * math.sqrt(ax + 1.0)) + 30) // 2)
    j_next, j_cur = 0.0, 1e-300
    norm = 0.0
    j1 = 0.0
    for k in range(start, 0, -1):
        j_prev = (2.0 * k / ax) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_next *= 1e-250
            norm *= 1e-250
            j1 *= 1e-250
        if k - 1 == 1:
            j1 = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
    norm += j_cur  # j_cur now holds J_0
    val = j1 / norm
    return val if x > 0 else -val


def bessel_j1(x: float) -> float:
    """Bessel function of the first kind of order one.

    Uses the power series for ``|x| <= 8`` and Miller's backward recurrence
    beyond, where the alternating series loses too many digits.
    """
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_j1 needs a finite argument, got {x!r}")
    if x == 0.0:
        return 0.0
    if abs(x) <= 8.0:
        return _bessel_series(x, -1.0)
    return _bessel_j1_miller(x)


def bessel_i1(x: float) -> float:
    """Modified Bessel function of the first kind of order one (power series)."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"bessel_i1 needs a finite argument, got {x!r}")
    if x == 0.0:
        return 0.0
    return _bessel_series(x, 1.0)
