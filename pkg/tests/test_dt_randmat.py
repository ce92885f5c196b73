import csv
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freelevy.dt_randmat import (SimConfig, hermitian_eigvals, log_spectrum_vs_f1, sample_dt, sample_matrix,
                                 spectral_moment_check, trial_generator, tridiagonal_eigvals, tridiagonalize,
                                 write_histogram, write_moment_rows)
from freelevy.errors import DomainError


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


@settings(deadline=None, max_examples=25)
@given(st.integers(1, 40), st.integers(0, 2 ** 32 - 1))
def test_eigenvalues_match_lapack(n, seed):
    A = random_hermitian(n, seed)
    ref = np.linalg.eigvalsh(A)
    assert np.allclose(hermitian_eigvals(A), ref, atol=1e-12 * max(1.0, np.abs(ref).max()))


def test_two_by_two_closed_form():
    A = np.array([[1.0, 2.0 - 1.0j], [2.0 + 1.0j, -3.0]])
    # eigenvalues of [[a, b], [b*, d]]: (a + d)/2 +- sqrt(((a - d)/2)^2 + |b|^2)
    r = math.sqrt(4.0 + 5.0)
    assert np.allclose(hermitian_eigvals(A), [-1.0 - r, -1.0 + r], atol=1e-14)


def test_tridiagonal_with_zero_offdiagonal_is_diagonal():
    assert np.allclose(tridiagonal_eigvals([3.0, 1.0, 2.0], [0.0, 0.0]), [1.0, 2.0, 3.0])


def test_tridiagonalize_preserves_frobenius_norm():
    A = random_hermitian(12, 7)
    d, e = tridiagonalize(A)
    assert np.sum(d ** 2) + 2 * np.sum(e ** 2) == pytest.approx(np.linalg.norm(A) ** 2, rel=1e-12)


def test_sample_matrix_structure_and_variance():
    N = 300
    T = sample_matrix(N, trial_generator(5, 0))
    assert np.all(np.tril(T) == 0)
    entries = T[np.triu_indices(N, 1)]
    # E|t|^2 = 1/N, standard error about 1/(N sqrt(N(N-1)/2))
    assert np.mean(np.abs(entries) ** 2) * N == pytest.approx(1.0, abs=0.02)
    assert abs(np.mean(entries)) < 0.01


def test_seed_replay_and_independence():
    a = sample_matrix(20, trial_generator(42, 3))
    b = sample_matrix(20, trial_generator(42, 3))
    c = sample_matrix(20, trial_generator(42, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_parallel_matches_serial():
    cfg = SimConfig(N=30, trials=3, seed=11)
    serial = sample_dt(cfg, jobs=1)
    parallel = sample_dt(cfg, jobs=2)
    assert all(np.array_equal(s, p) for s, p in zip(serial, parallel))


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(N=1)
    with pytest.raises(DomainError):
        SimConfig(N=5000)
    with pytest.raises(DomainError):
        SimConfig(trials=0)
    with pytest.raises(DomainError):
        SimConfig(moment_orders=(0,))
    with pytest.raises(DomainError, match="budget"):
        SimConfig(N=4000, trials=20)


def test_moments_near_theory_small_run(tmp_path):
    cfg = SimConfig(N=120, trials=4, seed=3)
    rows = spectral_moment_check(cfg)
    assert [r.theory for r in rows] == pytest.approx([0.5, 2.0 / 3.0, 27.0 / 24.0])
    assert all(r.rel_err < 0.05 for r in rows)
    write_moment_rows(rows, tmp_path / "m.csv")
    assert next(csv.reader(open(tmp_path / "m.csv"))) == ["n", "empirical", "stderr", "theory"]


def test_log_spectrum_warns_and_writes(tmp_path):
    cfg = SimConfig(N=60, trials=2, seed=1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        spec = log_spectrum_vs_f1(cfg, bins=32)
    assert spec.dropped >= cfg.trials  # T*T always has a zero eigenvalue
    assert any(issubclass(w.category, RuntimeWarning) for w in caught) == (spec.dropped > 0.01 * spec.total)
    assert spec.total == cfg.N * cfg.trials
    assert spec.edges.size == 33
    write_histogram(spec, tmp_path / "h.csv")
    rows = list(csv.reader(open(tmp_path / "h.csv")))
    assert rows[0] == ["bin_left", "bin_right", "density", "theory_density"] and len(rows) == 33
