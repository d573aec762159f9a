import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chirpcast.likelihood import (
    CorrelationStructure,
    NoiseModel,
    kms_bilinear,
    kms_logdet,
    kms_quadform,
    kms_solve,
    kms_whiten,
    loglik,
    loglik_dep,
    loglik_iid,
)
from chirpcast.model import ChirpParams, mean_vector
from oracles import dense_corr, dense_quad_logdet, mvn_logpdf

P = ChirpParams.from_amplitudes(2.0, 1.25, 1.75, 1.05)


def test_iid_zero_residual():
    y = mean_vector(P, 4)
    assert loglik_iid(y, P, 0.5) == pytest.approx(-2 * math.log(math.pi), rel=1e-14)


def test_iid_t1_is_univariate_normal():
    from scipy import stats
    y = np.array([0.3])
    assert loglik_iid(y, P, 0.7) == pytest.approx(stats.norm(mean_vector(P, 1)[0], math.sqrt(0.7)).logpdf(0.3))


def test_iid_dense_oracle():
    rng = np.random.default_rng(0)
    y = rng.normal(size=6)
    assert loglik_iid(y, P, 0.8) == pytest.approx(mvn_logpdf(y, mean_vector(P, 6), 0.8 * np.eye(6)), rel=1e-12)


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        loglik_iid([], P, 1.0)
    with pytest.raises(ValueError):
        loglik_dep([], P, NoiseModel(1.0, 0.5))
    with pytest.raises(ValueError):
        kms_quadform([], 0.5)


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_nonpositive_rho_rejected(rho):
    with pytest.raises(ValueError):
        kms_quadform([1.0, 2.0], rho)
    with pytest.raises(ValueError):
        NoiseModel(1.0, rho)
    with pytest.raises(ValueError):
        CorrelationStructure(3, rho)


def test_noise_model_invariants():
    with pytest.raises(ValueError):
        NoiseModel(0.0)
    assert not NoiseModel(1.0).dependent
    assert NoiseModel(1.0, 0.3).dependent


def test_quadform_t1():
    assert kms_quadform([1.7], 0.4) == (pytest.approx(1.7 ** 2), 0.0)


def test_quadform_large_rho_is_identity():
    v = np.random.default_rng(1).normal(size=30)
    q, ld = kms_quadform(v, 50.0)
    assert q == pytest.approx(v @ v, rel=1e-10)
    assert abs(ld) < 1e-10


def test_quadform_2x2_explicit_inverse():
    v = np.array([0.7, -1.3])
    inv = np.array([[4 / 3, -2 / 3], [-2 / 3, 4 / 3]])
    q, ld = kms_quadform(v, math.log(2))
    assert q == pytest.approx(v @ inv @ v, rel=1e-14)
    assert ld == pytest.approx(math.log(0.75), rel=1e-14)
    np.testing.assert_allclose(kms_solve(v, math.log(2)), inv @ v, rtol=1e-14)


def test_quadform_t50_dense():
    v = np.random.default_rng(2).normal(size=50)
    q, ld = kms_quadform(v, 0.3)
    dq, dld = dense_quad_logdet(v, 0.3)
    assert q == pytest.approx(dq, rel=1e-10)
    assert ld == pytest.approx(dld, rel=1e-10)


def test_whitening_factor_reproduces_matrix():
    # rows of W satisfy W' W = Delta^{-1}
    T, rho = 7, 0.6
    W = kms_whiten(np.eye(T), rho).T
    np.testing.assert_allclose(W.T @ W, np.linalg.inv(dense_corr(T, rho)), atol=1e-12)


def test_bilinear_and_structure():
    rng = np.random.default_rng(3)
    u, v = rng.normal(size=(2, 12))
    inv = np.linalg.inv(dense_corr(12, 1.1))
    assert kms_bilinear(u, v, 1.1) == pytest.approx(u @ inv @ v, rel=1e-11)
    cs = CorrelationStructure(12, 1.1)
    assert cs.phi == pytest.approx(math.exp(-1.1))
    assert cs.logdet == pytest.approx(kms_logdet(12, 1.1))
    np.testing.assert_allclose(cs.solve(v), inv @ v, rtol=1e-10)


@settings(max_examples=60)
@given(st.integers(1, 40), st.floats(1e-3, 20), st.integers(0, 10**6))
def test_quadform_positive(T, rho, seed):
    v = np.random.default_rng(seed).normal(size=T)
    assert kms_quadform(v, rho)[0] > 0


def test_dep_large_rho_agrees_with_iid():
    y = np.random.default_rng(4).normal(size=40)
    assert loglik_dep(y, P, NoiseModel(0.6, 50.0)) == pytest.approx(loglik_iid(y, P, 0.6), abs=1e-8)


def test_dep_zero_residual():
    T, s2, rho = 9, 0.4, 0.8
    phi = math.exp(-rho)
    expected = -T / 2 * math.log(2 * math.pi * s2) - (T - 1) / 2 * math.log(1 - phi ** 2)
    assert loglik_dep(mean_vector(P, T), P, NoiseModel(s2, rho)) == pytest.approx(expected, rel=1e-13)


def test_dep_dense_oracle():
    rng = np.random.default_rng(5)
    y = rng.normal(size=10)
    expected = mvn_logpdf(y, mean_vector(P, 10), 0.9 * dense_corr(10, 0.35))
    assert loglik_dep(y, P, NoiseModel(0.9, 0.35)) == pytest.approx(expected, rel=1e-10)


def test_dispatch():
    y = np.random.default_rng(6).normal(size=8)
    assert loglik(y, P, NoiseModel(0.5)) == loglik_iid(y, P, 0.5)
    assert loglik(y, P, NoiseModel(0.5, 0.2)) == loglik_dep(y, P, NoiseModel(0.5, 0.2))


def test_dep_continuous_in_rho():
    # fine grid: successive differences shrink with the step, no jumps anywhere
    y = np.random.default_rng(7).normal(size=25) + mean_vector(P, 25)
    rhos = np.geomspace(1e-3, 60, 4001)
    vals = np.array([loglik_dep(y, P, NoiseModel(0.5, r)) for r in rhos])
    assert np.all(np.isfinite(vals))
    jumps = np.abs(np.diff(vals))
    coarse = np.array([loglik_dep(y, P, NoiseModel(0.5, r)) for r in rhos[::2]])
    assert np.abs(np.diff(coarse)).max() >= jumps.max()
    assert jumps.max() < 0.05 * (vals.max() - vals.min())


@settings(max_examples=40)
@given(st.floats(0.1, 10), st.integers(1, 30), st.integers(0, 10**6))
def test_iid_scaling(c, T, seed):
    y = np.random.default_rng(seed).normal(size=T)
    scaled = P.with_(r=c * P.r)
    lhs = loglik_iid(c * y, scaled, 0.5 * c * c)
    assert lhs == pytest.approx(loglik_iid(y, P, 0.5) - T * math.log(c), rel=1e-10, abs=1e-10)


@pytest.mark.parametrize("T", [1, 2, 3, 8])
def test_solve_matches_dense_inverse(T):
    v = np.random.default_rng(T).normal(size=T)
    np.testing.assert_allclose(kms_solve(v, 0.45), np.linalg.solve(dense_corr(T, 0.45), v), rtol=1e-12)
