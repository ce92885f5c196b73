"""Catalog of closed-form laws and their transforms.

Stable families (classical, free, Boolean), Cauchy, semicircle,
Dykema-Haagerup, free Bessel, the laws ``nu_alpha`` and ``mu_{alpha,beta}``
given through their S-transforms, the periodised free stable law
``lambda_{alpha,rho}``, Marchenko-Pastur and atomic laws.

Conventions
-----------
S and Sigma are linked by ``Sigma(z) = S(z / (1 - z))``; for a law that is
infinitely divisible for multiplicative free convolution ``Sigma = exp(v)``
with ``v`` analytic on ``C \\ [0, inf)``.  Powers and logarithms are
principal unless stated otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import BoundaryError, DivergenceError, DomainError, NotInfinitelyDivisibleError
from .measures import AtomicMeasure, GridDensity, KnownLaw

__all__ = [
    "AdmissiblePair",
    "ClassicalStable",
    "FreeStable",
    "BooleanStable",
    "Cauchy",
    "Semicircle",
    "DykemaHaagerup",
    "FreeBessel",
    "NuAlpha",
    "MuAlphaBeta",
    "LambdaFreeStable",
    "MarchenkoPastur",
    "PointMass",
    "TwoPoint",
    "CuspLaw",
    "boolean_stable_density",
    "free_stable_voiculescu",
    "free_stable_density_parametric",
    "free_stable_f1_grid",
    "dh_density_parametric",
    "dh_grid",
    "dh_moment",
    "dh_mellin",
    "sigma_transform_of",
    "v_function_of",
    "s_transform_of",
    "boolean_stable_boxtimes_power",
    "s_transform_inverse_law",
    "classical_stable_cf",
    "log_cauchy_density",
    "log_boolean_stable_density",
]

PARAMETRIC_POINTS = 2048


def _pow_upper(w, p):
    """``w**p`` with negative reals read as ``w + i0`` (argument +pi)."""
    w = np.asarray(w, dtype=complex)
    out = np.abs(w) ** p * np.exp(1j * p * np.angle(w))
    neg_real = (w.imag == 0) & (w.real < 0)
    if np.any(neg_real):
        out = np.where(neg_real, np.abs(w) ** p * np.exp(1j * p * np.pi), out)
    return out


def _pow_lower(w, p):
    """``w**p`` with negative reals read as ``w - i0`` (argument -pi)."""
    return np.conj(_pow_upper(np.conj(w), p))


# ----------------------------------------------------------- admissibility

@dataclass(frozen=True)
class AdmissiblePair:
    """Stability index ``alpha`` and asymmetry ``rho``.

    Admissible means ``alpha in (0, 1]`` with ``rho in [0, 1]``, or
    ``alpha in (1, 2]`` with ``rho in [1 - 1/alpha, 1/alpha]``.
    """

    alpha: float
    rho: float

    def __post_init__(self):
        a, r = float(self.alpha), float(self.rho)
        if not (0.0 < a <= 2.0):
            raise DomainError(f"alpha must lie in (0, 2], got {a!r}")
        if a <= 1.0:
            if not (0.0 <= r <= 1.0):
                raise DomainError(f"for alpha <= 1 need rho in [0, 1], got rho={r!r}")
        else:
            lo, hi = 1.0 - 1.0 / a, 1.0 / a
            if not (lo - 1e-12 <= r <= hi + 1e-12):
                raise DomainError(
                    f"for alpha in (1, 2] need rho in [1-1/alpha, 1/alpha] = [{lo:.6g}, {hi:.6g}], got rho={r!r}"
                )
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "rho", r)

    @property
    def theta(self) -> float:
        return self.alpha * self.rho * math.pi


# ------------------------------------------------------- stable densities

def boolean_stable_density(alpha, rho, r, x):
    """Density of the Boolean stable law ``b_{alpha,rho,r}``.

    Parameters
    ----------
    alpha, rho : float
        Admissible pair.
    r : float
        Scale parameter, ``r > 0``.
    x : float or array_like
        Evaluation points, all non-zero.

    Returns
    -------
    float or ndarray
    """
    AdmissiblePair(alpha, rho)
    if r <= 0:
        raise DomainError("r must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0):
        raise DomainError("Boolean stable density is singular at x = 0")
    ax = np.abs(xa)
    th = np.where(xa > 0, alpha * rho * np.pi, alpha * (1.0 - rho) * np.pi)
    lx = np.log(ax)
    xa_a = np.exp(alpha * lx)
    # x^{2a} + 2 r cos(th) x^a + r^2 = (x^a - r)^2 + 4 r x^a cos^2(th/2);
    # the right side has no cancellation when th is close to pi
    gap = r * np.expm1(alpha * lx - math.log(r))
    den = gap * gap + 4.0 * r * xa_a * np.cos(0.5 * th) ** 2
    val = (r * np.sin(th) / np.pi) * np.exp((alpha - 1.0) * lx) / den
    val = np.where(np.abs(np.sin(th)) < 1e-300, 0.0, val)
    return val if val.ndim else float(val)


def free_stable_voiculescu(alpha, rho, z):
    """Voiculescu transform of the free stable law ``f_{alpha,rho}``."""
    p = AdmissiblePair(alpha, rho)
    z = np.asarray(z, dtype=complex)
    if p.alpha == 1.0:
        out = -1j * p.rho * np.pi - (1.0 - 2.0 * p.rho) * np.log(z)
    else:
        out = -np.exp(1j * p.theta) * z ** (1.0 - p.alpha)
    return out if out.ndim else complex(out)


def classical_stable_cf(alpha, rho, z):
    """``E[exp(x z)]`` of the classical stable law for ``z`` on ``i(-inf, 0)``."""
    p = AdmissiblePair(alpha, rho)
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z.real) > 1e-15 * np.maximum(1.0, np.abs(z))) or np.any(z.imag >= 0):
        raise DomainError("classical_stable_cf needs z on the negative imaginary axis")
    if p.alpha == 1.0:
        out = np.exp(-1j * p.rho * np.pi * z + (1.0 - 2.0 * p.rho) * z * np.log(z))
    else:
        out = np.exp(-np.exp(1j * p.theta) * z ** p.alpha / math.gamma(1.0 + p.alpha))
    return out if out.ndim else complex(out)


def free_stable_density_parametric(theta):
    """Point ``x`` and density ``q(x)`` of the free 1-stable law ``f_1``.

    ``x = theta cot(theta) + log(sin(theta)/theta)`` and
    ``q = sin(theta)^2 / (pi theta)`` for ``theta in (0, pi)``.
    """
    th = np.asarray(theta, dtype=float)
    if np.any((th <= 0) | (th >= np.pi)):
        raise DomainError("theta must lie in (0, pi)")
    s = np.sin(th)
    x = th * np.cos(th) / s + np.log(s / th)
    q = s * s / (np.pi * th)
    return x, q


def _f1_dx_dtheta(th):
    s = np.sin(th)
    return 2.0 * np.cos(th) / s - th / (s * s) - 1.0 / th


def dh_density_parametric(theta):
    """Point ``x`` and density ``p(x)`` of the Dykema-Haagerup law ``DH_1``."""
    th = np.asarray(theta, dtype=float)
    if np.any((th <= 0) | (th >= np.pi)):
        raise DomainError("theta must lie in (0, pi)")
    s = np.sin(th)
    tc = th * np.cos(th) / s
    return (s / th) * np.exp(tc), (s / np.pi) * np.exp(-tc)


def _theta_nodes(n):
    return np.pi * (np.arange(n) + 0.5) / n


def _jacobian_normalised(x, p, dx_dth, n):
    # trapezoid in x overshoots on the convex far tail; rescale to the
    # midpoint-rule mass computed in theta, which is accurate
    target = float(np.sum(p * np.abs(dx_dth))) * np.pi / n
    trap = float(np.sum(0.5 * (p[1:] + p[:-1]) * np.diff(x)))
    return p * (min(target, 1.0) / trap)


def free_stable_f1_grid(n: int = PARAMETRIC_POINTS) -> GridDensity:
    """``f_1`` density materialised on the image of a uniform theta grid."""
    th = _theta_nodes(n)[::-1]
    x, q = free_stable_density_parametric(th)
    return GridDensity(x, _jacobian_normalised(x, q, _f1_dx_dtheta(th), n))


def dh_grid(r: float = 1.0, n: int = PARAMETRIC_POINTS) -> GridDensity:
    """``DH_r`` density on a grid, via ``DH_r = D_{r^-r}(DH_1^r)`` for ``r != 1``."""
    th = _theta_nodes(n)[::-1]
    # the density has a log-integrable spike at 0; nodes below 1e-8 are dropped
    with np.errstate(over="ignore"):
        x, p = dh_density_parametric(th)
    keep = (x > 1e-8) & np.isfinite(p)
    th, x, p = th[keep], x[keep], p[keep]
    # log x(theta) is the f_1 abscissa, so dx/dtheta = x * (f_1 derivative)
    p = _jacobian_normalised(x, p, x * _f1_dx_dtheta(th), n)
    if r != 1.0:
        if r <= 0:
            raise DomainError("grid density of DH_r needs r > 0")
        # y = r^-r x^r
        y = r ** (-r) * x ** r
        jac = r ** (-r) * r * x ** (r - 1.0)
        x, p = y, p / jac
    return GridDensity(x, p)


def dh_moment(r: float, n: int) -> float:
    """``n^(r n) / Gamma(2 + r n)`` with ``0^0 = 1``."""
    if r < 0 or n < 0 or int(n) != n:
        raise DomainError("dh_moment needs r >= 0 and integer n >= 0")
    rn = r * n
    lognum = rn * math.log(n) if n > 0 and rn > 0 else 0.0
    return math.exp(lognum - specfun.log_gamma(2.0 + rn))


def dh_mellin(r: float, gamma: float) -> float:
    """``gamma^(r gamma) / Gamma(2 + r gamma)`` for ``gamma >= 0``."""
    if gamma < 0:
        raise DomainError("closed-form DH Mellin transform is for gamma >= 0")
    rg = r * gamma
    lognum = rg * math.log(gamma) if gamma > 0 and rg > 0 else 0.0
    return math.exp(lognum - specfun.log_gamma(2.0 + rg))


def log_cauchy_density(beta, gamma, x):
    """Density of ``exp(C)`` for ``C`` Cauchy with location beta and scale gamma."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("log-Cauchy density needs x > 0")
    lx = np.log(xa) - beta
    val = gamma / (np.pi * xa * (lx * lx + gamma * gamma))
    return val if val.ndim else float(val)


def log_boolean_stable_density(alpha, rho, r, x):
    """Density of ``exp(B)`` with ``B`` distributed as ``b_{alpha,rho,r}``."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("log Boolean stable density needs alpha in (0, 1)")
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0) or np.any(xa == 1.0):
        raise DomainError("log Boolean stable density needs x > 0, x != 1")
    val = np.asarray(boolean_stable_density(alpha, rho, r, np.log(xa))) / xa
    return val if val.ndim else float(val)


# --------------------------------------------------------------- law types

@dataclass(frozen=True, repr=False)
class ClassicalStable(KnownLaw):
    pair: AdmissiblePair
    name = "classicalstable"

    def cf(self, z):
        return classical_stable_cf(self.pair.alpha, self.pair.rho, z)


@dataclass(frozen=True, repr=False)
class FreeStable(KnownLaw):
    """Free stable law; densities only for alpha = 1, rho = 0 and alpha = 2."""

    pair: AdmissiblePair
    name = "freestable"

    def voiculescu(self, z):
        return free_stable_voiculescu(self.pair.alpha, self.pair.rho, z)

    def grid_density(self) -> GridDensity:
        a, r = self.pair.alpha, self.pair.rho
        if a == 1.0 and r == 0.0:
            return free_stable_f1_grid()
        if a == 2.0:
            x = np.linspace(-2.0, 2.0, PARAMETRIC_POINTS)
            return GridDensity(x, Semicircle().density(x))
        raise NotImplementedError("closed-form densities exist only for f_1 and f_2")


@dataclass(frozen=True, repr=False)
class BooleanStable(KnownLaw):
    """Boolean stable law with ``F(z) = z + r e^{i alpha rho pi} z^(1-alpha)``."""

    pair: AdmissiblePair
    r: float = 1.0
    name = "booleanstable"

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("r must be positive")

    @property
    def support(self):
        if self.pair.rho == 1.0 and self.pair.alpha <= 1.0:
            return (0.0, math.inf)
        if self.pair.rho == 0.0 and self.pair.alpha <= 1.0:
            return (-math.inf, 0.0)
        return (-math.inf, math.inf)

    def F(self, z):
        z = np.asarray(z, dtype=complex)
        lower = z.imag < 0
        zu = np.where(lower, np.conj(z), z)
        val = zu + self.r * np.exp(1j * self.pair.theta) * _pow_upper(zu, 1.0 - self.pair.alpha)
        return np.where(lower, np.conj(val), val)

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        real = z.imag == 0
        if np.any(real & (z.real == 0)):
            raise BoundaryError("Boolean stable F is singular at 0")
        lo, hi = self.support
        if np.any(real & (z.real > lo) & (z.real < hi)):
            raise BoundaryError("real evaluation point inside the support; use boundary_F")
        return 1.0 / self.F(z)

    def boundary_cauchy(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise BoundaryError("Boolean stable F is singular at 0")
        return 1.0 / self.F(x + 0j)

    def density(self, x):
        return boolean_stable_density(self.pair.alpha, self.pair.rho, self.r, x)

    def mellin(self, gamma):
        """``int x^gamma db`` for the positive law (``rho = 1``, ``alpha <= 1``).

        ``r^(g/alpha) sin(pi g) / (alpha sin(pi g / alpha))`` for ``|g| < alpha``.
        """
        a = self.pair.alpha
        if not (self.pair.rho == 1.0 and a <= 1.0):
            raise DomainError("Mellin moments are tabulated for laws on (0, inf) only")
        g = float(gamma)
        if abs(g) >= a:
            raise DivergenceError("Mellin moment diverges for |gamma| >= alpha")
        if g == 0:
            return 1.0
        return self.r ** (g / a) * math.sin(math.pi * g) / (a * math.sin(math.pi * g / a))


@dataclass(frozen=True, repr=False)
class Cauchy(KnownLaw):
    beta: float = 0.0
    gamma: float = 1.0
    name = "cauchy"

    def __post_init__(self):
        if self.gamma < 0:
            raise DomainError("gamma must be non-negative")

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if self.gamma > 0 and np.any(z.imag == 0):
            raise BoundaryError("Cauchy law has full support; use boundary_F")
        sgn = np.where(z.imag >= 0, 1.0, -1.0)
        return 1.0 / (z - self.beta + 1j * self.gamma * sgn)

    def boundary_cauchy(self, x):
        return 1.0 / (np.asarray(x, dtype=float) - self.beta + 1j * self.gamma)

    def F(self, z):
        return 1.0 / self.cauchy(z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.gamma / (np.pi * ((x - self.beta) ** 2 + self.gamma ** 2))

    def voiculescu(self, z):
        return np.full(np.shape(z), self.beta - 1j * self.gamma, dtype=complex)


@dataclass(frozen=True, repr=False)
class Semicircle(KnownLaw):
    """Standard semicircle law on [-2, 2]."""

    name = "semicircle"
    support = (-2.0, 2.0)

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any((z.imag == 0) & (np.abs(z.real) <= 2)):
            raise BoundaryError("real evaluation point inside [-2, 2]")
        return 0.5 * (z - np.sqrt(z - 2.0) * np.sqrt(z + 2.0))

    def boundary_cauchy(self, x):
        # +0j imaginary parts select the upper-half-plane limit of each sqrt
        z = np.asarray(x, dtype=float) + 0j
        return 0.5 * (z - np.sqrt(z - 2.0) * np.sqrt(z + 2.0))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * np.pi)

    def laplace(self, gamma):
        from scipy import integrate
        return integrate.quad(lambda x: math.exp(-gamma * x) * math.sqrt(4 - x * x) / (2 * math.pi),
                              -2.0, 2.0, epsabs=1e-14, epsrel=1e-13)[0]


@dataclass(frozen=True, repr=False)
class MarchenkoPastur(KnownLaw):
    """Free Poisson law with rate one, ``S(z) = 1/(1+z)``."""

    name = "mp"
    support = (0.0, 4.0)
    infinitely_divisible = True

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any((z.imag == 0) & (z.real >= 0) & (z.real <= 4)):
            raise BoundaryError("real evaluation point inside [0, 4]")
        return (z - np.sqrt(z) * np.sqrt(z - 4.0)) / (2.0 * z)

    def boundary_cauchy(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x == 0):
            raise BoundaryError("MP Cauchy transform has no boundary value at 0")
        z = x + 0j
        return (z - np.sqrt(z) * np.sqrt(z - 4.0)) / (2.0 * z)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.sqrt(np.clip(4.0 - x, 0.0, None) / x) / (2.0 * np.pi)
        return np.where((x > 0) & (x <= 4), v, 0.0)

    def mellin(self, gamma):
        if gamma <= -0.5:
            raise DomainError("MP Mellin moment diverges for gamma <= -1/2")
        lg = specfun.log_gamma
        return math.exp(lg(2 * gamma + 1) - lg(gamma + 1) - lg(gamma + 2))

    def S(self, z):
        return 1.0 / (1.0 + np.asarray(z, dtype=complex))

    def v(self, z):
        return np.log(1.0 - np.asarray(z, dtype=complex))


@dataclass(frozen=True, repr=False)
class FreeBessel(KnownLaw):
    """Free Bessel law ``pi(r, s)`` with ``Sigma = (1-z)^r / ((1-s) z + s)``."""

    r: float = 1.0
    s: float = 1.0
    name = "freebessel"

    def __post_init__(self):
        if self.r < 0 or self.s < 0 or max(self.r, self.s) < 1:
            raise DomainError("free Bessel law needs r, s >= 0 and max(r, s) >= 1")

    @property
    def infinitely_divisible(self) -> bool:
        return self.s == 1.0 or (self.r >= 1.0 and self.s > 1.0)

    def S(self, z):
        if self.s == 0:
            raise DomainError("S-transform undefined for s = 0 (point mass at 0)")
        z = np.asarray(z, dtype=complex)
        return (1.0 + z) ** (1.0 - self.r) / (z + self.s)

    def v(self, z):
        z = np.asarray(z, dtype=complex)
        return self.r * np.log(1.0 - z) - np.log((1.0 - self.s) * z + self.s)


@dataclass(frozen=True, repr=False)
class NuAlpha(KnownLaw):
    """Law with ``S(z) = exp((-z)^(alpha-1))``, ``alpha in (1, 2]``."""

    alpha: float = 2.0
    name = "nu"
    infinitely_divisible = True

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise DomainError("nu_alpha needs alpha in (1, 2]")

    def S(self, z):
        return np.exp((-np.asarray(z, dtype=complex)) ** (self.alpha - 1.0))

    def v(self, z):
        z = np.asarray(z, dtype=complex)
        return (z / (z - 1.0)) ** (self.alpha - 1.0)


@dataclass(frozen=True, repr=False)
class MuAlphaBeta(KnownLaw):
    """Law with ``S(z) = (-z)^a / (1+z)^b``."""

    a: float = 0.0
    b: float = 0.0
    name = "mualphabeta"
    infinitely_divisible = True

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise DomainError("mu_{alpha,beta} needs alpha, beta >= 0")

    def S(self, z):
        z = np.asarray(z, dtype=complex)
        return (-z) ** self.a / (1.0 + z) ** self.b

    def v(self, z):
        z = np.asarray(z, dtype=complex)
        return self.a * np.log(-z) + (self.b - self.a) * np.log(1.0 - z)


@dataclass(frozen=True, repr=False)
class LambdaFreeStable(KnownLaw):
    """Free infinitely divisible law with ``phi(z) = phi_{f_{alpha,rho}}(tan z)``."""

    pair: AdmissiblePair
    name = "lambda"

    def voiculescu(self, z):
        return free_stable_voiculescu(self.pair.alpha, self.pair.rho, np.tan(np.asarray(z, dtype=complex)))


@dataclass(frozen=True, repr=False)
class DykemaHaagerup(KnownLaw):
    r: float = 1.0
    name = "dh"

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("DH_r needs r >= 0")

    @property
    def support(self):
        if self.r == 0:
            return (1.0, 1.0)
        return (0.0, self.r ** (-self.r) * math.e ** self.r)

    def moment(self, n):
        return dh_moment(self.r, n)

    def mellin(self, gamma):
        return dh_mellin(self.r, gamma)

    def grid_density(self) -> GridDensity:
        return dh_grid(self.r)


@dataclass(frozen=True, repr=False)
class PointMass(KnownLaw):
    a: float = 1.0
    name = "point"

    @property
    def support(self):
        return (self.a, self.a)

    @property
    def atomic(self) -> AtomicMeasure:
        return AtomicMeasure([self.a], [1.0])

    def cauchy(self, z):
        return self.atomic.cauchy(z)

    def boundary_cauchy(self, x):
        return self.atomic.boundary_cauchy(x)

    def mellin(self, gamma):
        return self.atomic.mellin(gamma)

    def S(self, z):
        if self.a == 0:
            raise DomainError("S-transform undefined for the point mass at 0")
        return np.full(np.shape(z), 1.0 / self.a, dtype=complex)

    def v(self, z):
        if self.a <= 0:
            raise NotInfinitelyDivisibleError("point mass must sit in (0, inf)")
        return np.full(np.shape(z), -math.log(self.a), dtype=complex)

    infinitely_divisible = True


@dataclass(frozen=True, repr=False)
class TwoPoint(KnownLaw):
    """``w delta_a + (1 - w) delta_b``; ``twopoint:2,0.5`` is ``(delta_2 + delta_0.5)/2``."""

    a: float = 2.0
    b: float = 0.5
    w: float = 0.5
    name = "twopoint"

    def __post_init__(self):
        if not (0.0 < self.w < 1.0) or self.a == self.b:
            raise DomainError("two-point law needs distinct atoms and weight in (0, 1)")

    @property
    def atomic(self) -> AtomicMeasure:
        return AtomicMeasure.from_pairs([(self.a, self.w), (self.b, 1.0 - self.w)])

    @property
    def support(self):
        return self.atomic.support

    def cauchy(self, z):
        return self.atomic.cauchy(z)

    def boundary_cauchy(self, x):
        return self.atomic.boundary_cauchy(x)

    def mellin(self, gamma):
        return self.atomic.mellin(gamma)

    def S(self, z):
        """S-transform on ``(-1, 0)``.

        The moment series ``psi(u) = w a u/(1 - a u) + (1 - w) b u/(1 - b u)``
        is inverted on ``(-inf, 0)``: ``psi(u) = y`` is the quadratic
        ``a b (1 + y) u^2 - (m + (a + b) y) u + y = 0`` with mean ``m``, whose
        negative root gives ``S(y) = u (1 + y) / y``.
        """
        if self.a <= 0 or self.b <= 0:
            raise DomainError("S-transform needs both atoms in (0, inf)")
        y = np.asarray(z, dtype=complex)
        if np.any(np.abs(y.imag) > 0) or np.any((y.real <= -1) | (y.real >= 0)):
            raise DomainError("two-point S-transform is tabulated on (-1, 0)")
        y = y.real
        a, b = self.a, self.b
        m = self.w * a + (1.0 - self.w) * b
        A = a * b * (1.0 + y)
        B = -(m + (a + b) * y)
        disc = np.sqrt(B * B - 4.0 * A * y)
        # the product of the roots y / A is negative; take the negative one
        # in the cancellation-free form
        q = -0.5 * (B + np.where(B >= 0, 1.0, -1.0) * disc)
        r1, r2 = q / A, y / q
        u = np.where(r1 < 0, r1, r2)
        return (u * (1.0 + y) / y).astype(complex)


@dataclass(frozen=True, repr=False)
class CuspLaw(KnownLaw):
    """Density ``(alpha/2) |x - 1|^(alpha - 1)`` on ``(0, 2)``, ``alpha in (0, 1)``.

    Its F-transform behaves like ``r e^{i alpha pi/2} (x - 1)^(1-alpha)``
    near one with ``r = 2 sin(alpha pi/2) / (alpha pi)``.
    """

    alpha: float = 0.5
    name = "cusp"
    support = (0.0, 2.0)

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError("cusp law needs alpha in (0, 1)")

    @property
    def r(self) -> float:
        return 2.0 * math.sin(self.alpha * math.pi / 2.0) / (self.alpha * math.pi)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            v = 0.5 * self.alpha * np.abs(x - 1.0) ** (self.alpha - 1.0)
        return np.where((x > 0) & (x < 2) & (x != 1), v, 0.0)

    def _diff_upper(self, w):
        """``I(w) - I(-w)`` for ``w`` in the closed upper half-plane."""
        a = self.alpha
        w = np.asarray(w, dtype=complex)
        out = np.empty_like(w)
        aw = np.abs(w)
        small = aw < 0.8
        large = aw > 1.25
        mid = ~(small | large)
        if np.any(small):
            ws = w[small]
            sing = -(np.pi / math.sin(np.pi * a)) * (_pow_lower(-ws, a - 1.0) - _pow_upper(ws, a - 1.0))
            acc = np.zeros_like(ws)
            wk = ws.copy()
            w2 = ws * ws
            for k in range(1, 400, 2):
                acc += wk / (k + 1.0 - a)
                wk = wk * w2
                if np.all(np.abs(wk) < 1e-17 * np.maximum(np.abs(acc), 1e-300)):
                    break
            out[small] = sing + 2.0 * acc
        if np.any(large):
            wl = 1.0 / w[large]
            acc = np.zeros_like(wl)
            wk = wl.copy()
            w2 = wl * wl
            for k in range(0, 400, 2):
                acc += wk / (a + k)
                wk = wk * w2
                if np.all(np.abs(wk) < 1e-17 * np.maximum(np.abs(acc), 1e-300)):
                    break
            out[large] = 2.0 * acc
        if np.any(mid):
            out[mid] = [self._diff_quad(v) for v in w[mid]]
        return out

    def _diff_quad(self, w):
        from scipy import integrate
        a = self.alpha

        def part(fun):
            return integrate.quad(fun, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0), limit=400)[0]

        def g(u):
            return 1.0 / (w - u) + 1.0 / (w + u)

        return complex(part(lambda u: g(u).real), part(lambda u: g(u).imag))

    def _cauchy_upper(self, z):
        return 0.5 * self.alpha * self._diff_upper(z - 1.0)

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any((z.imag == 0) & (z.real >= 0) & (z.real <= 2)):
            raise BoundaryError("real evaluation point inside [0, 2]; use boundary_F")
        lower = z.imag < 0
        val = self._cauchy_upper(np.where(lower, np.conj(z), z))
        return np.where(lower, np.conj(val), val)

    def boundary_cauchy(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x == 1.0):
            raise BoundaryError("cusp law has no boundary value at x = 1")
        return self._cauchy_upper(x + 0j)

    def boundary_cauchy_offset(self, w):
        """``G(1 + w + i0)`` from the offset ``w`` (avoids forming ``1 + w``)."""
        return 0.5 * self.alpha * self._diff_upper(np.asarray(w, dtype=float) + 0j)

    def mellin(self, gamma):
        from scipy import integrate
        a = self.alpha
        left = integrate.quad(lambda y: (1.0 - y) ** gamma, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0))[0]
        right = integrate.quad(lambda y: (1.0 + y) ** gamma, 0.0, 1.0, weight="alg", wvar=(a - 1.0, 0.0))[0]
        return 0.5 * a * (left + right)


# ------------------------------------------------------- S / Sigma / v

def _require_id(law):
    flag = getattr(law, "infinitely_divisible", None)
    if isinstance(law, BooleanStable):
        ok = law.pair.rho == 1.0 and law.pair.alpha < 1.0 and law.r == 1.0
        if not ok:
            raise NotInfinitelyDivisibleError(
                "only the positive Boolean stable law b_{alpha,1,1}, alpha < 1, is handled")
        return
    if flag is None:
        raise NotInfinitelyDivisibleError(f"{law!r} has no tabulated Sigma-transform")
    if not flag:
        raise NotInfinitelyDivisibleError(f"{law!r} is not infinitely divisible for multiplicative free convolution")


def v_function_of(law, z):
    """Analytic logarithm ``v`` of the Sigma-transform, ``Sigma = exp(v)``."""
    _require_id(law)
    z = np.asarray(z, dtype=complex)
    if isinstance(law, BooleanStable):
        a = law.pair.alpha
        out = ((1.0 - a) / a) * np.log(-z)
    else:
        out = law.v(z)
    out = np.asarray(out, dtype=complex)
    return out if out.ndim else complex(out)


def sigma_transform_of(law, z):
    """Sigma-transform on the negative half-line."""
    z = np.asarray(z, dtype=float)
    if np.any(z >= 0):
        raise DomainError("Sigma-transform is evaluated on (-inf, 0)")
    out = np.exp(np.asarray(v_function_of(law, z + 0j)).real)
    return out if out.ndim else float(out)


def s_transform_of(law, z):
    """S-transform on ``(-1, 0)``: ``S(z) = Sigma(z / (1 + z))``."""
    z = np.asarray(z, dtype=complex)
    if hasattr(law, "S"):
        out = np.asarray(law.S(z), dtype=complex)
    elif isinstance(law, BooleanStable):
        a = law.pair.alpha
        _require_id(law)
        out = (-z / (1.0 + z)) ** ((1.0 - a) / a)
    else:
        raise NotImplementedError(f"no S-transform for {law!r}")
    return out if out.ndim else complex(out)


def s_transform_inverse_law(law, z):
    """S-transform of the push-forward of ``law`` under ``x -> 1/x``.

    Uses ``S_{mu^-1}(z) = 1 / S_mu(-1 - z)``.
    """
    z = np.asarray(z, dtype=float)
    if np.any((z <= -1) | (z >= 0)):
        raise DomainError("z must lie in (-1, 0)")
    out = 1.0 / np.asarray(s_transform_of(law, -1.0 - z))
    return out if out.ndim else complex(out)


def boolean_stable_boxtimes_power(alpha: float, t: float) -> BooleanStable:
    """Time-t law of the multiplicative free semigroup through ``b_alpha``.

    ``Sigma_{b_alpha}(z) = (-z)^((1-alpha)/alpha)`` is raised to the power
    ``t``, which gives ``b_{alpha'}`` with ``alpha' = alpha / (alpha + (1-alpha) t)``.
    """
    if not (0.0 < alpha < 1.0) or not (t > 0.0):
        raise DomainError("need alpha in (0, 1) and t > 0")
    a2 = alpha / (alpha + (1.0 - alpha) * t)
    return BooleanStable(AdmissiblePair(a2, 1.0), 1.0)
