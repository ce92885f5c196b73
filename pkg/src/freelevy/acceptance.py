"""The twelve acceptance checks, each returning a self-describing result.

Every check records the computed numbers, the thresholds they are compared
with, and its wall time.  The CLI ``verify`` command and the acceptance
tests both run these functions.
"""
from __future__ import annotations

import cmath
import math
import time
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import specfun
from .boolean_small_time import (additive_boolean_power_density, log_boolean_stable_limit_check,
                                 log_cauchy_limit_check, log_cauchy_parameters)
from .circle_wrap import (FiniteMeasure, additive_to_mult_pair, lambda_voiculescu_convergence,
                          mult_to_additive_pair, series_identity_check, unitary_bm_limit_check,
                          wrap_homomorphism_check)
from .dt_randmat import SimConfig, log_spectrum_vs_f1, sample_dt, spectral_moment_check
from .ecalc import (boolean_power, free_power, free_power_map, from_probability_measure,
                    from_v_function, semigroup_at)
from .free_small_time import (exact_boolean_stable_power_density, free_power_density_values,
                              tucci_convergence_check, tucci_limit)
from .laws import (AdmissiblePair, BooleanStable, Cauchy, MarchenkoPastur, Semicircle, TwoPoint,
                   boolean_stable_boxtimes_power, boolean_stable_density, log_cauchy_density)
from .mellin_moments import (free_bessel_table, laplace_free_stable, multi_law_series, nu_alpha_series,
                             nu_alpha_table)

__all__ = ["CriterionResult", "CRITERIA", "run_criterion", "EXPECTED_FAILURES"]

# criteria whose thresholds the exact mathematics does not reach at the
# stated parameters; see README for the numbers
EXPECTED_FAILURES = {6, 7}


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    values: dict
    thresholds: dict
    runtime: float = 0.0
    runtime_limit: float = math.inf
    checks: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [k for k, ok in self.checks.items() if not ok]
        extra = f" (failed: {', '.join(failed)})" if failed else ""
        return f"{status} criterion {self.number}: {self.title} [{self.runtime:.2f} s]{extra}"

    def as_dict(self) -> dict:
        return asdict(self)


def _finish(number, title, checks, values, thresholds, t0, limit):
    runtime = time.perf_counter() - t0
    checks = {k: bool(v) for k, v in checks.items()}
    checks["runtime"] = runtime < limit
    return CriterionResult(number, title, all(checks.values()), values, thresholds,
                           runtime, limit, checks)


def criterion_1():
    t0 = time.perf_counter()
    mu = TwoPoint(2.0, 0.5)
    beta, gamma = log_cauchy_parameters(mu)
    tab = log_cauchy_limit_check(mu, [1e-2, 1e-3], (0.2, 5.0))
    d2, d3 = tab.distance
    checks = {"limit_parameters": abs(beta) < 1e-10 and abs(gamma - math.pi) < 1e-10,
              "distance_t1e-3": d3 < 5e-2, "decreasing": d2 > d3}
    return _finish(1, "Boolean log-Cauchy limit of a two-point law", checks,
                   {"beta": beta, "gamma": gamma, "distance_t1e-2": d2, "distance_t1e-3": d3},
                   {"distance_t1e-3": 5e-2, "parameters": 1e-10}, t0, 5.0)


def criterion_2():
    t0 = time.perf_counter()
    tab = log_boolean_stable_limit_check(0.5, (1.2, 4.0), (0.25, 0.85), [1e-2, 1e-3])
    d2, d3 = tab.distance
    checks = {"distance_t1e-3": d3 < 8e-2, "decreasing": d2 > d3}
    return _finish(2, "Boolean log-stable limit of the cusp law", checks,
                   {"distance_t1e-2": d2, "distance_t1e-3": d3, "r": tab.params["r"]},
                   {"distance_t1e-3": 8e-2}, t0, 10.0)


def criterion_3():
    t0 = time.perf_counter()
    law = BooleanStable(AdmissiblePair(0.5, 1.0))
    x = np.linspace(0.3, 3.0, 512)
    limit = log_cauchy_density(0.0, math.pi, x)
    t = 1e-3
    exact = exact_boolean_stable_power_density(0.5, t, 1.0 / t, x)
    pipeline = free_power_density_values(law, t, 1.0 / t, x)
    d_exact = float(np.max(np.abs(exact - limit)))
    d_pipe = float(np.max(np.abs(pipeline - limit)))
    ta = 0.25
    agree = float(np.max(np.abs(exact_boolean_stable_power_density(0.5, ta, 1.0 / ta, x)
                                - free_power_density_values(law, ta, 1.0 / ta, x))))
    checks = {"exact_route": d_exact < 5e-2, "pipeline_route": d_pipe < 5e-2, "routes_agree": agree < 1e-3}
    return _finish(3, "free log-Cauchy limit of b_1/2 by two routes", checks,
                   {"distance_exact": d_exact, "distance_pipeline": d_pipe, "route_gap_t0.25": agree},
                   {"distance": 5e-2, "route_gap": 1e-3}, t0, 30.0)


def criterion_4():
    t0 = time.perf_counter()
    tabs = {"r1_s2": free_bessel_table(1.0, 2.0, 1e-4, [1, 2, 3]),
            "r1_s1": free_bessel_table(1.0, 1.0, 1e-4, [1, 2, 3]),
            "r2_s1": free_bessel_table(2.0, 1.0, 1e-4, [1, 2, 3])}
    checks = {k: max(v.rel_err) < 1e-2 for k, v in tabs.items()}
    values = {k: {"values": list(v.values), "limits": list(v.limit_values), "rel_err": list(v.rel_err)}
              for k, v in tabs.items()}
    return _finish(4, "free Bessel moments approach the Dykema-Haagerup moments", checks,
                   values, {"rel_err": 1e-2}, t0, 1.0)


def criterion_5():
    t0 = time.perf_counter()
    tab = nu_alpha_table(2.0, 1e-6, [1, 2])
    bessel = [specfun.bessel_i1(2.0 * g) / g for g in (1, 2)]
    rel = [abs(v - b) / b for v, b in zip(tab.values, bessel)]
    lap = laplace_free_stable(2.0, 1.0)
    quad = Semicircle().laplace(1.0)
    checks = {"series_vs_bessel": max(rel) < 1e-2, "laplace_vs_quadrature": abs(lap - quad) < 1e-6}
    return _finish(5, "nu_2 moments approach the semicircle Laplace transform", checks,
                   {"values": list(tab.values), "bessel": bessel, "rel_err": rel,
                    "laplace_series": lap, "laplace_quadrature": quad},
                   {"rel_err": 1e-2, "laplace": 1e-6}, t0, 1.0)


def criterion_6():
    t0 = time.perf_counter()
    t = 1e-6
    xi = t ** -0.5
    val = multi_law_series([2.0, 1.5], [1.0, 1.0], 1.0, t, xi)
    target = specfun.bessel_i1(2.0)
    single = multi_law_series([2.0], [1.0], 1.0, t, xi)
    direct = nu_alpha_series(2.0, 1.0, t, xi)
    checks = {"k2_vs_bessel": abs(val - target) < 2e-2, "k1_reduction": single == direct}
    return _finish(6, "two-law series approaches I_1(2)", checks,
                   {"value": val, "target": target, "abs_err": abs(val - target),
                    "k1_value": single, "nu_alpha_value": direct},
                   {"abs_err": 2e-2, "k1_reduction": 0.0}, t0, 5.0)


def criterion_7():
    t0 = time.perf_counter()
    mp = MarchenkoPastur()
    lim = tucci_limit(mp)
    cdf_dev = float(np.max(np.abs(lim.quantile_y - lim.quantile_x)))
    tab = tucci_convergence_check(mp, [8, 16, 32, 64])
    d = np.asarray(tab.distance)
    checks = {"uniform_quantile": cdf_dev < 1e-6, "distance_t64": d[-1] < 5e-2,
              "monotone": bool(np.all(np.diff(d) < 0))}
    return _finish(7, "large-time limit of Marchenko-Pastur powers is uniform", checks,
                   {"cdf_deviation": cdf_dev, "distances": list(tab.distance), "t": list(tab.t)},
                   {"cdf_deviation": 1e-6, "distance_t64": 5e-2}, t0, 60.0)


ECALC_GRID = -np.logspace(-2.0, 2.0, 64)


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) / np.asarray(b) - 1.0)))


def ecalc_residuals() -> dict:
    """Power-law, commutation and key-identity residuals on the 64-point grid."""
    x = ECALC_GRID
    b = BooleanStable(AdmissiblePair(0.5, 1.0))
    inputs = {"mp": from_probability_measure(MarchenkoPastur()), "b_half": from_probability_measure(b)}
    out = {}
    for name, eta in inputs.items():
        boolean = 0.0
        free = 0.0
        for s in (1.0, 1.5, 2.0, 3.0):
            for t in (1.0, 1.5, 2.0, 3.0):
                lhs = boolean_power(boolean_power(eta, s, check=False), t, check=False).eta(x)
                boolean = max(boolean, _rel(lhs, boolean_power(eta, s * t, check=False).eta(x)))
                lhs = free_power(free_power_map(eta, s, check=False), t, x)
                free = max(free, _rel(lhs, free_power(eta, s * t, x)))
        comm = 0.0
        for p in (0.3, 0.7, 1.2):
            for q in (1.5, 2.0):
                qq = 1.0 - p + p * q
                pp = p * q / qq
                lhs = free_power(boolean_power(eta, p, check=False), q, x)
                rhs = boolean_power(free_power_map(eta, qq, check=False), pp, check=False).eta(x)
                comm = max(comm, _rel(lhs, rhs))
        out[name] = {"boolean_powers": boolean, "free_powers": free, "commutation": comm}
    v = from_v_function(b)
    key = 0.0
    for t in (0.25, 0.5):
        exact = from_probability_measure(boolean_stable_boxtimes_power(0.5, t)).eta(x)
        key = max(key, _rel(semigroup_at(v, t).eta(x), exact))
    out["key_identity"] = key
    return out


def criterion_8():
    t0 = time.perf_counter()
    res = ecalc_residuals()
    checks = {}
    for name in ("mp", "b_half"):
        for k, v in res[name].items():
            checks[f"{name}_{k}"] = v < 1e-8
    checks["key_identity"] = res["key_identity"] < 1e-6
    return _finish(8, "eta-calculus power laws, commutation and key identity", checks,
                   res, {"powers_commutation": 1e-8, "key_identity": 1e-6}, t0, 10.0)


def criterion_9(seed: int = 42, jobs: int = 1):
    t0 = time.perf_counter()
    cfg = SimConfig(N=400, trials=10, seed=seed)
    spectra = sample_dt(cfg, jobs)
    rows = spectral_moment_check(cfg, spectra)
    with warnings.catch_warnings():
        # about 4% of the eigenvalues lie below 1e-12; expected for this law
        warnings.simplefilter("ignore", RuntimeWarning)
        hist = log_spectrum_vs_f1(cfg, spectra=spectra)
    checks = {f"moment_{r.n}": r.rel_err < 0.05 for r in rows}
    checks["log_spectrum"] = hist.sup_distance < 0.05
    checks["max_log_eigenvalue"] = hist.max_log_eig < 1.1
    return _finish(9, "strictly upper-triangular Gaussian matrix spectra", checks,
                   {"moments": [r.empirical for r in rows], "theory": [r.theory for r in rows],
                    "rel_err": [r.rel_err for r in rows], "sup_distance": hist.sup_distance,
                    "max_log_eig": hist.max_log_eig, "dropped": hist.dropped, "seed": seed},
                   {"moment_rel_err": 0.05, "sup_distance": 0.05, "max_log_eig": 1.1}, t0, 60.0)


def criterion_10():
    t0 = time.perf_counter()
    rows = unitary_bm_limit_check([1e-2, 1e-4])
    early = {r.n: r.abs_err for r in rows if r.t == 1e-2}
    late = {r.n: r.abs_err for r in rows if r.t == 1e-4}
    checks = {f"n{n}_t1e-4": late[n] < 1e-2 for n in late}
    checks.update({f"n{n}_decreasing": late[n] < early[n] for n in late})
    return _finish(10, "free unitary Brownian motion moments approach J_1(2n)/n", checks,
                   {"abs_err_t1e-2": [early[n] for n in sorted(early)],
                    "abs_err_t1e-4": [late[n] for n in sorted(late)]},
                   {"abs_err": 1e-2}, t0, 1.0)


def _round_trip_sigma():
    g = np.linspace(0.0, 2.0 * math.pi, 257)
    return FiniteMeasure([0.0, 1.0, 4.0], [0.2, 0.3, 0.1], g, 0.1 * (1.0 + np.cos(g)) ** 2 + 0.05)


def criterion_11():
    t0 = time.perf_counter()
    hom = wrap_homomorphism_check(Cauchy(0.0, 1.0), (1j, 1.0 + 1j, 2.0 + 0.5j))
    lhs, rhs = series_identity_check(math.pi)
    sigma = _round_trip_sigma()
    gamma = cmath.exp(0.7j)
    xi, tau = mult_to_additive_pair(gamma, sigma, 0.7)
    back = additive_to_mult_pair(xi, tau)
    trip = max(abs(back.gamma - gamma), float(np.max(np.abs(back.sigma.weights - sigma.weights))),
               float(np.max(np.abs(back.sigma.values - sigma.values))))
    lam = {}
    for a, r in ((2.0, 0.5), (1.5, 0.6), (1.0, 0.5)):
        lam[f"{a:g},{r:g}"] = lambda_voiculescu_convergence(a, r, [1e-6])[0][1]
    checks = {"homomorphism": hom < 1e-8, "series_identity": abs(lhs - 0.25) < 1e-12 and abs(rhs - 0.25) < 1e-12,
              "pair_round_trip": trip < 1e-8}
    checks.update({f"lambda_{k}": v < 1e-2 for k, v in lam.items()})
    return _finish(11, "wrapping map, series identity, generating pairs and periodised stable laws",
                   checks, {"homomorphism": hom, "series_lhs": lhs, "series_rhs": rhs,
                            "round_trip": trip, "lambda": lam},
                   {"homomorphism": 1e-8, "series": 1e-12, "round_trip": 1e-8, "lambda": 1e-2}, t0, 5.0)


STABLE_SAMPLES = ((0.5, 1.0), (0.7, 0.3), (1.0, 0.5), (1.2, 0.2), (1.8, 0.5))


def criterion_12():
    t0 = time.perf_counter()
    x = np.concatenate([-np.geomspace(5.0, 0.1, 25), np.geomspace(0.1, 5.0, 25)])
    worst = 0.0
    for a, r in STABLE_SAMPLES:
        law = BooleanStable(AdmissiblePair(a, r))
        target = boolean_stable_density(a, r, 1.0, x)
        for t in (0.3, 0.7):
            c = t ** (1.0 / a)
            # density of t^(-1/alpha) Y for Y with the additive Boolean power law
            scaled = c * np.asarray(additive_boolean_power_density(law, t, c * x))
            worst = max(worst, float(np.max(np.abs(scaled - target))))
    checks = {"pointwise": worst < 1e-10}
    return _finish(12, "rescaled Boolean powers of Boolean stable laws are exact", checks,
                   {"max_residual": worst}, {"pointwise": 1e-10}, t0, 1.0)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11, 12: criterion_12}


def run_criterion(number: int, **kwargs) -> CriterionResult:
    return CRITERIA[number](**kwargs)
