import numpy as np
import pytest

from tracewitness.errors import DimensionMismatch, InvalidConfig, NormalizationError, NotPSDError
from tracewitness.functionals import (
    TraceFunctional,
    apply,
    classify_traciality,
    commutator_defect,
    is_scalar,
    normalize,
    rank_one_spread,
)


def test_apply_examples():
    assert apply(TraceFunctional(np.diag([1.0, 2.0])), np.diag([2.0, 1.0])) == 4.0
    X = np.array([[1.0, 2.0 + 1j], [2.0 - 1j, 5.0]])
    assert apply(TraceFunctional(np.eye(2)), X) == pytest.approx(6.0)


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi / 4, 1.2])
def test_apply_rank_one(theta):
    s = 3.0
    u = np.array([np.cos(theta), np.sin(theta)])
    phi = TraceFunctional(np.diag([s, 1.0]))
    assert phi(np.outer(u, u)) == pytest.approx(1 + (s - 1) * np.cos(theta) ** 2)


def test_apply_checks_shape_and_hermiticity():
    phi = TraceFunctional(np.diag([1.0, 2.0]))
    with pytest.raises(DimensionMismatch):
        phi(np.eye(3))
    with pytest.raises(ValueError):
        phi(np.array([[1j, 0], [0, 0]]))


def test_density_must_be_psd():
    with pytest.raises(NotPSDError):
        TraceFunctional(np.diag([1.0, -0.5]))


def test_normalize():
    phi = normalize(TraceFunctional(np.diag([3.0, 1.0])), 1.0)
    np.testing.assert_allclose(phi.density, np.diag([0.75, 0.25]))
    with pytest.raises(NormalizationError):
        normalize(TraceFunctional(np.zeros((2, 2))), 1.0)


def test_commutator_defect():
    assert commutator_defect(TraceFunctional(2.5 * np.eye(3))) <= 1e-12
    assert commutator_defect(TraceFunctional(np.diag([1.0, 2.0])), 100, seed=1) > 1e-3
    with pytest.raises(InvalidConfig):
        commutator_defect(TraceFunctional(np.eye(2)), 0)


def test_rank_one_spread():
    assert rank_one_spread(TraceFunctional(2.0 * np.eye(4))) <= 1e-12
    phi = TraceFunctional(np.diag([1.0, 2.0]))
    small = rank_one_spread(phi, 10, seed=3)
    large = rank_one_spread(phi, 5000, seed=3)
    assert 0 < small <= large <= 1.0
    assert large > 0.95
    with pytest.raises(InvalidConfig):
        rank_one_spread(phi, 0)


def test_classify_traciality():
    v = classify_traciality(TraceFunctional(3.0 * np.eye(4)))
    assert v.is_scalar and v.scalar_c == pytest.approx(3.0)
    assert not classify_traciality(TraceFunctional(np.diag([1.0, 2.0]))).is_scalar
    assert is_scalar(TraceFunctional(np.diag([1 + 1e-14, 1.0])), tol=1e-10)


def test_kadison(sampler):
    s = sampler(4)
    for _ in range(20):
        phi = TraceFunctional(s.density())
        A = s.hermitian()
        assert phi(A) ** 2 <= phi(A @ A) + 1e-9


def test_trace_is_unitarily_invariant(sampler):
    s = sampler(3)
    phi = TraceFunctional(1.7 * np.eye(3))
    A, U = s.hermitian(), s.unitary()
    assert phi(U.conj().T @ A @ U) == pytest.approx(phi(A), abs=1e-10)


def test_non_scalar_is_not_unitarily_invariant():
    phi = TraceFunctional(np.diag([1.0, 2.0]))
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    A = np.diag([1.0, 0.0])
    assert phi(swap @ A @ swap) != pytest.approx(phi(A))
