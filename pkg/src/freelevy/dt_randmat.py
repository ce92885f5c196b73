"""Spectra of strictly upper-triangular complex Gaussian matrices.

``T`` is ``N x N`` with independent entries ``t_ij`` (``i < j``), complex
Gaussian with mean zero and ``E|t_ij|^2 = 1/N``.  The spectral law of
``T* T`` approaches the Dykema-Haagerup law ``DH_1`` and that of
``log(T* T)`` the free 1-stable law ``f_1``.

Sampling: trial ``k`` of master seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence([s, k])))``; uniforms are
turned into complex Gaussians by the polar Box-Muller map
``sqrt(-log(1 - u1) / N) * exp(2 pi i u2)``.  Eigenvalues come from a
Householder reduction to real tridiagonal form followed by implicit QL
with Wilkinson shifts.
"""
from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericError
from .laws import dh_moment, free_stable_f1_grid
from .measures import fmt17

__all__ = [
    "SimConfig",
    "trial_generator",
    "sample_matrix",
    "hermitian_eigvals",
    "tridiagonalize",
    "tridiagonal_eigvals",
    "sample_dt",
    "MomentRow",
    "spectral_moment_check",
    "LogSpectrum",
    "log_spectrum_vs_f1",
    "write_moment_rows",
    "write_histogram",
]

MAX_N = 4096
DEFAULT_BUDGET = 2e8
LOG_BINS = 64
LOG_RANGE = (-6.0, 1.2)
COMPARE_RANGE = (-4.0, 0.9)
ZERO_CUT = 1e-12
QL_MAX_SWEEPS = 60


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``budget`` caps ``trials * N**2`` so a typo cannot start an hour-long run.
    """

    N: int = 400
    trials: int = 10
    seed: int = 42
    moment_orders: tuple = (1, 2, 3)
    budget: float = DEFAULT_BUDGET

    def __post_init__(self):
        if int(self.N) != self.N or not (2 <= self.N <= MAX_N):
            raise DomainError(f"N must be an integer in [2, {MAX_N}]")
        if int(self.trials) != self.trials or self.trials < 1:
            raise DomainError("trials must be a positive integer")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise DomainError("seed must be a 64-bit unsigned integer")
        orders = tuple(int(n) for n in self.moment_orders)
        if not orders or any(n < 1 for n in orders):
            raise DomainError("moment orders must be positive integers")
        object.__setattr__(self, "moment_orders", orders)
        if self.trials * self.N ** 2 > self.budget:
            raise DomainError(f"trials * N^2 = {self.trials * self.N ** 2:.3g} exceeds the budget {self.budget:.3g}")


def trial_generator(seed: int, k: int) -> np.random.Generator:
    """Independent stream for trial ``k``: PCG64 seeded by ``SeedSequence([seed, k])``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(k)])))


def sample_matrix(N: int, rng: np.random.Generator) -> np.ndarray:
    """Strictly upper-triangular ``T`` with ``E|t_ij|^2 = 1/N``."""
    iu = np.triu_indices(N, k=1)
    m = iu[0].size
    u1 = rng.random(m)
    u2 = rng.random(m)
    radius = np.sqrt(-np.log1p(-u1) / N)
    T = np.zeros((N, N), dtype=complex)
    T[iu] = radius * np.exp(2j * np.pi * u2)
    return T


def tridiagonalize(A: np.ndarray):
    """Householder reduction of a Hermitian matrix.

    Returns the diagonal and the moduli of the off-diagonal of a real
    symmetric tridiagonal matrix with the same spectrum.
    """
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if A.shape != (n, n):
        raise DomainError("matrix must be square")
    off = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1:, k]
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        alpha = -phase * norm
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = A[k + 1:, k + 1:]
        p = sub @ v
        K = float(np.real(np.vdot(v, p)))
        w = p - K * v
        sub -= 2.0 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        A[k + 1:, k] = 0.0
        A[k, k + 1:] = 0.0
        off[k] = norm
    if n >= 2:
        off[n - 2] = abs(A[n - 1, n - 2])
    return np.real(np.diag(A)).copy(), off


def tridiagonal_eigvals(diag, off) -> np.ndarray:
    """Eigenvalues of a real symmetric tridiagonal matrix by implicit QL.

    Raises
    ------
    NumericError
        If an eigenvalue needs more than 60 QL sweeps.
    """
    d = [float(v) for v in diag]
    n = len(d)
    e = [float(v) for v in off] + [0.0]
    eps = np.finfo(float).eps
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > QL_MAX_SWEEPS:
                raise NumericError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def hermitian_eigvals(A: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix."""
    return tridiagonal_eigvals(*tridiagonalize(A))


def _one_trial(args):
    N, seed, k = args
    T = sample_matrix(N, trial_generator(seed, k))
    ev = hermitian_eigvals(T.conj().T @ T)
    if ev[0] < -1e-10:
        raise NumericError(f"T*T has eigenvalue {ev[0]:.3g} < 0")
    return ev


def sample_dt(config: SimConfig, jobs: int = 1) -> list:
    """Eigenvalues of ``T* T`` for each trial, sorted ascending."""
    tasks = [(config.N, config.seed, k) for k in range(config.trials)]
    if jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_one_trial, tasks))
    return [_one_trial(t) for t in tasks]


# ----------------------------------------------------------------- moments

@dataclass(frozen=True)
class MomentRow:
    n: int
    empirical: float
    stderr: float
    theory: float

    @property
    def rel_err(self) -> float:
        return abs(self.empirical - self.theory) / self.theory


def spectral_moment_check(config: SimConfig, spectra=None, jobs: int = 1) -> list:
    """Trial-averaged ``(1/N) Tr (T* T)^n`` against ``n^n/(n+1)!``."""
    spectra = sample_dt(config, jobs) if spectra is None else spectra
    rows = []
    for n in config.moment_orders:
        per_trial = np.array([np.mean(ev ** n) for ev in spectra])
        se = float(np.std(per_trial, ddof=1) / math.sqrt(per_trial.size)) if per_trial.size > 1 else 0.0
        rows.append(MomentRow(n, float(per_trial.mean()), se, dh_moment(1.0, n)))
    return rows


# ------------------------------------------------------------ log spectrum

@dataclass(frozen=True)
class LogSpectrum:
    """Histogram of log-eigenvalues against the bin-averaged ``f_1`` density."""

    edges: np.ndarray
    density: np.ndarray
    theory_density: np.ndarray
    sup_distance: float
    dropped: int
    total: int
    max_log_eig: float
    compare_range: tuple = field(default=COMPARE_RANGE)


def _bin_average(grid_density, edges):
    x, v = grid_density.grid, grid_density.values
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * np.diff(x))])
    F = np.interp(edges, x, cum, left=0.0, right=cum[-1])
    return np.diff(F) / np.diff(edges)


def log_spectrum_vs_f1(config: SimConfig, bins: int = LOG_BINS, spectra=None,
                       jobs: int = 1) -> LogSpectrum:
    """Histogram of ``log`` eigenvalues over ``[-6, 1.2]`` and its sup distance to ``f_1``.

    Eigenvalues ``<= 1e-12`` are dropped (``T* T`` always has an exact zero
    eigenvalue); a warning is issued when more than 1% are dropped.  The
    histogram is normalised by the total number of eigenvalues: dropped ones
    sit in the far left tail of ``f_1``, outside the binned range, like the
    ones below ``-6``.  The distance is taken over bins whose centres lie in
    ``[-4, 0.9]``.
    """
    spectra = sample_dt(config, jobs) if spectra is None else spectra
    ev = np.concatenate(spectra)
    keep = ev > ZERO_CUT
    dropped = int(ev.size - keep.sum())
    if dropped > 0.01 * ev.size:
        warnings.warn(f"{dropped} of {ev.size} eigenvalues are numerically zero", RuntimeWarning)
    logs = np.log(ev[keep])
    edges = np.linspace(LOG_RANGE[0], LOG_RANGE[1], bins + 1)
    counts, _ = np.histogram(logs, bins=edges)
    dens = counts / (ev.size * np.diff(edges))
    theory = _bin_average(free_stable_f1_grid(), edges)
    centres = 0.5 * (edges[1:] + edges[:-1])
    sel = (centres >= COMPARE_RANGE[0]) & (centres <= COMPARE_RANGE[1])
    dist = float(np.max(np.abs(dens[sel] - theory[sel])))
    return LogSpectrum(edges, dens, theory, dist, dropped, int(ev.size), float(logs.max()))


def write_moment_rows(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "empirical", "stderr", "theory"])
        for r in rows:
            w.writerow([r.n, fmt17(r.empirical), fmt17(r.stderr), fmt17(r.theory)])


def write_histogram(spec: LogSpectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["bin_left", "bin_right", "density", "theory_density"])
        for a, b, d, t in zip(spec.edges[:-1], spec.edges[1:], spec.density, spec.theory_density):
            w.writerow([fmt17(a), fmt17(b), fmt17(d), fmt17(t)])
