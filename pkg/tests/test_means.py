import numpy as np
import pytest
import scipy.linalg as sla

from tracewitness.errors import ConditionError, DimensionMismatch, NotDensityError, NotPDError
from tracewitness.means import (
    MeanKind,
    arithmetic_mean,
    bures_cross,
    fidelity,
    fidelity_amplitude,
    mean,
    metric_geomean,
    riccati_solution,
    sgm_from_riccati,
    spectral_geomean,
)

D41 = np.diag([4.0, 1.0])
I2 = np.eye(2)


def scipy_metric_mean(A, B):
    # independent route: A (A^{-1} B)^{1/2} via a general (Schur) square root
    return A @ sla.sqrtm(np.linalg.solve(A, B))


def test_arithmetic_mean_example():
    np.testing.assert_allclose(arithmetic_mean(D41, I2), np.diag([2.5, 1.0]))


def test_arithmetic_mean_trace(sampler):
    s = sampler(4)
    A, B = s.pd(), s.pd()
    M = arithmetic_mean(A, B)
    assert np.trace(M).real == pytest.approx((np.trace(A) + np.trace(B)).real / 2)
    assert np.linalg.eigvalsh(M)[0] > 0


@pytest.mark.parametrize("fn", [arithmetic_mean, metric_geomean, spectral_geomean])
def test_idempotent(fn, sampler):
    A = sampler(3).pd()
    np.testing.assert_allclose(fn(A, A), A, atol=1e-9)


def test_metric_mean_commuting_diagonal():
    np.testing.assert_allclose(metric_geomean(D41, I2), np.diag([2.0, 1.0]), atol=1e-14)


def test_metric_mean_against_scipy(sampler):
    s = sampler(4)
    for _ in range(10):
        A, B = s.pd(), s.pd()
        G = metric_geomean(A, B)
        np.testing.assert_allclose(G, scipy_metric_mean(A, B), rtol=1e-6, atol=1e-8)


def test_riccati_examples(sampler):
    np.testing.assert_allclose(riccati_solution(D41, I2), np.diag([0.5, 1.0]), atol=1e-14)
    B = sampler(3).pd()
    np.testing.assert_allclose(riccati_solution(np.eye(3), B), sla.sqrtm(B), atol=1e-9)


def test_riccati_residual(sampler):
    s = sampler(5)
    A, B = s.pd(), s.pd()
    X = riccati_solution(A, B)
    assert np.linalg.norm(X @ A @ X - B) <= 1e-8 * (1 + np.linalg.norm(B))
    assert np.linalg.eigvalsh(X)[0] > 0


def test_spectral_mean_diagonal_example():
    np.testing.assert_allclose(spectral_geomean(D41, I2), np.diag([2.0, 1.0]), atol=1e-14)


def test_spectral_mean_from_scipy_riccati(sampler):
    # A ♮ B = X^{1/2} A X^{1/2} with X = A^{-1} # B computed independently
    s = sampler(3)
    A, B = s.pd(), s.pd()
    X = scipy_metric_mean(np.linalg.inv(A), B)
    Xh = sla.sqrtm(X)
    np.testing.assert_allclose(spectral_geomean(A, B), Xh @ A @ Xh, rtol=1e-6, atol=1e-8)


def test_spectral_eigenvalues_are_roots_of_ab(sampler):
    s = sampler(4)
    A, B = s.pd(), s.pd()
    lam = np.linalg.eigvalsh(spectral_geomean(A, B))
    mu = np.sort(np.linalg.eigvals(A @ B).real)
    np.testing.assert_allclose(lam, np.sqrt(mu), rtol=1e-8)


def test_means_differ_when_not_commuting():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    B = np.diag([1.0, 3.0])
    assert np.linalg.norm(metric_geomean(A, B) - spectral_geomean(A, B)) > 1e-3


def test_sgm_from_riccati():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    X = np.array([[1.0, 0.2], [0.2, 0.5]])
    M = sgm_from_riccati(A, X)
    np.testing.assert_allclose(M, spectral_geomean(A, X @ A @ X), atol=1e-10)


def test_bures_cross_identity(sampler):
    B = sampler(3).pd()
    np.testing.assert_allclose(bures_cross(np.eye(3), B), sla.sqrtm(B), atol=1e-9)


def test_bures_cross_rank_one_pair():
    lam, t = 2.5, 0.3
    u = np.array([1.0, 0.0])
    v = np.array([np.cos(t), np.sin(t)])
    P = bures_cross(lam * np.outer(u, u), lam * np.outer(v, v))
    np.testing.assert_allclose(P, lam * abs(u @ v) * np.outer(u, u), atol=1e-12)


def test_mean_dispatch():
    assert MeanKind("spectral") is MeanKind.SPECTRAL_GEOMETRIC
    np.testing.assert_allclose(mean("metric", D41, I2), np.diag([2.0, 1.0]), atol=1e-14)


def test_not_pd_rejected():
    with pytest.raises(NotPDError):
        metric_geomean(np.diag([1.0, 0.0]), I2)
    with pytest.raises(NotPDError):
        arithmetic_mean(np.diag([1.0, -1.0]), I2)


def test_condition_cap():
    # the relative PD tolerance already bounds the condition number near 1e10,
    # so exercise the cap directly with a smaller limit
    from tracewitness.means import _pd_eig

    with pytest.raises(ConditionError):
        _pd_eig(np.diag([1.0, 1e-9]), "A", cond_cap=1e6)
    with pytest.raises(NotPDError):
        spectral_geomean(np.diag([1.0, 1e-13]), I2)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        metric_geomean(I2, np.eye(3))


def test_commuting_pair_means_agree():
    U = np.linalg.qr(np.array([[1.0, 2.0, 0.0], [0.5, -1.0, 1.0], [0.0, 1.0, 3.0]]))[0]
    A = U @ np.diag([1.0, 2.0, 3.0]) @ U.T
    B = U @ np.diag([0.5, 4.0, 1.0]) @ U.T
    np.testing.assert_allclose(metric_geomean(A, B), spectral_geomean(A, B), atol=1e-12)


def test_fidelity_same_state(sampler):
    rho = sampler(3).density()
    assert fidelity_amplitude(rho, rho) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_pure_states(sampler):
    s = sampler(3)
    u, rho = s.pure_density()
    v, sigma = s.pure_density()
    assert fidelity(rho, sigma) == pytest.approx(abs(np.vdot(u, v)) ** 2, abs=1e-10)


def test_fidelity_commuting_is_bhattacharyya():
    p = np.array([0.2, 0.5, 0.3])
    q = np.array([0.6, 0.1, 0.3])
    assert fidelity_amplitude(np.diag(p), np.diag(q)) == pytest.approx(np.sum(np.sqrt(p * q)), abs=1e-14)


def test_fidelity_against_definition(sampler):
    s = sampler(4)
    rho, sigma = s.density(), s.density()
    r = sla.sqrtm(rho)
    direct = np.trace(sla.sqrtm(r @ sigma @ r)).real
    assert fidelity_amplitude(rho, sigma) == pytest.approx(direct, abs=1e-9)
    assert fidelity(rho, sigma) == pytest.approx(fidelity(sigma, rho), abs=1e-12)


def test_fidelity_needs_unit_trace():
    with pytest.raises(NotDensityError):
        fidelity(I2, I2 / 2)


def test_commuting_counterexample_pair_satisfies_agm():
    # commuting pair: A ♮ B = A # B <= (A + B)/2, so no functional can separate them
    S = np.diag([1.0, 2.0])
    lhs = np.trace(S @ spectral_geomean(D41, I2)).real
    rhs = np.trace(S @ arithmetic_mean(D41, I2)).real
    assert lhs == pytest.approx(4.0)
    assert rhs == pytest.approx(4.5)
