# tests/test_tensor_core.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tools.errors import PreconditionError
from tools.tensor_core import (
    BASIS,
    QTensor,
    biaxiality,
    director,
    eigen,
    from_matrix,
    from_uniaxial,
    norm_sq,
    random_qtensor,
    random_rotation,
    rotate,
    to_matrix,
    tr_Q2,
    tr_Q3,
)


def test_basis_is_orthonormal_symmetric_traceless():
    gram = np.einsum("aij,bij->ab", BASIS, BASIS)
    assert_allclose(gram, np.eye(5), atol=1e-15)
    assert_allclose(BASIS, np.swapaxes(BASIS, 1, 2))
    assert_allclose(np.trace(BASIS, axis1=1, axis2=2), 0.0, atol=1e-15)


def test_matrix_roundtrip_preserves_coefficients(rng):
    c = random_qtensor(rng, size=20)
    assert_allclose(from_matrix(to_matrix(c)), c, atol=1e-14)
    q = QTensor(c[0])
    assert isinstance(from_matrix(q.matrix), QTensor)


def test_from_matrix_rejects_non_traceless():
    with pytest.raises(PreconditionError):
        from_matrix(np.eye(3))
    with pytest.raises(PreconditionError):
        from_matrix(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))


def test_uniaxial_norm_equals_s():
    n = np.array([1.0, 2.0, 2.0]) / 3.0
    q = from_uniaxial(0.7, n)
    assert_allclose(q.norm, 0.7, rtol=1e-14)
    assert_allclose(q.matrix, np.sqrt(1.5) * 0.7 * (np.outer(n, n) - np.eye(3) / 3.0), atol=1e-15)


def test_from_uniaxial_requires_unit_director():
    with pytest.raises(PreconditionError):
        from_uniaxial(1.0, [1.0, 1.0, 0.0])


def test_invariants_agree_with_matrix_traces(rng):
    c = random_qtensor(rng, size=50)
    m = to_matrix(c)
    assert_allclose(norm_sq(c), np.einsum("nij,nij->n", m, m), rtol=1e-13)
    assert_allclose(tr_Q2(c), norm_sq(c), rtol=1e-13)
    assert_allclose(tr_Q3(c), np.trace(m @ m @ m, axis1=1, axis2=2), rtol=1e-12, atol=1e-14)


def test_biaxiality_range_and_uniaxial_zero(rng):
    beta = biaxiality(random_qtensor(rng, size=200))
    assert np.all((beta >= 0.0) & (beta <= 1.0))
    assert biaxiality(from_uniaxial(0.3, [0.0, 0.0, 1.0])) == pytest.approx(0.0, abs=1e-14)
    assert biaxiality(QTensor.zero()) == 0.0


def test_maximally_biaxial_tensor():
    # eigenvalues (1, 0, -1) have tr Q^3 = 0
    q = from_matrix(np.diag([1.0, 0.0, -1.0]))
    assert biaxiality(q) == pytest.approx(1.0)


def test_invariants_are_rotation_invariant(rng):
    c = random_qtensor(rng, size=10)
    T = random_rotation(rng)
    assert_allclose(T @ T.T, np.eye(3), atol=1e-14)
    rc = rotate(c, T)
    assert_allclose(norm_sq(rc), norm_sq(c), rtol=1e-13)
    assert_allclose(tr_Q3(rc), tr_Q3(c), rtol=1e-11, atol=1e-14)


def test_eigen_reconstructs_random_tensors(rng):
    for c in random_qtensor(rng, size=100):
        frame = eigen(c)
        assert np.all(np.diff(frame.eigenvalues) <= 0.0)
        assert_allclose(frame.reconstruct(), to_matrix(c), atol=1e-12)
        assert_allclose(frame.eigenvectors.T @ frame.eigenvectors, np.eye(3), atol=1e-12)


def test_eigen_degenerate_spectrum_falls_back():
    q = from_uniaxial(1.0, [0.0, 0.0, 1.0])
    frame = eigen(q)
    s = np.sqrt(1.5)
    assert_allclose(frame.eigenvalues, [2.0 * s / 3.0, -s / 3.0, -s / 3.0], atol=1e-14)
    assert_allclose(frame.reconstruct(), q.matrix, atol=1e-14)


def test_eigen_of_zero_tensor():
    frame = eigen(QTensor.zero())
    assert_allclose(frame.eigenvalues, 0.0)
    assert director(QTensor.zero()) is None


def test_director_of_uniaxial_tensor():
    n = np.array([0.0, 0.6, 0.8])
    d = director(from_uniaxial(1.0, n))
    assert abs(abs(np.dot(d, n)) - 1.0) < 1e-12


def test_qtensor_arithmetic_and_immutability():
    a = QTensor([1.0, 0.0, 0.0, 0.0, 0.0])
    b = QTensor([0.0, 1.0, 0.0, 0.0, 0.0])
    assert_allclose((a + b).coeffs, [1.0, 1.0, 0.0, 0.0, 0.0])
    assert_allclose((2.0 * a - b).coeffs, [2.0, -1.0, 0.0, 0.0, 0.0])
    assert_allclose((-a).coeffs, [-1.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        a.coeffs[0] = 5.0
