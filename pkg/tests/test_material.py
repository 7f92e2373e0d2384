# tests/test_material.py

import numpy as np
import pytest
from numpy.testing import assert_allclose

from tools.errors import DomainError, ParameterError
from tools.material import (
    MaterialParams,
    ReducedParams,
    bulk_f_dimensional,
    bulk_f_reduced,
    bulk_f_uniaxial,
    bulk_lower_envelope,
    el_rhs_dimensional,
    h_plus_envelope_holds,
    h_plus_of,
    reduce,
    reduction_factor,
    rescale_to_reduced,
)
from tools.tensor_core import from_uniaxial, random_qtensor, random_rotation, rotate


@pytest.fixture
def params():
    return MaterialParams.build(a2=0.5, b2=1.0, c2=2.0, L=1.5, R0=20.0)


def test_reduce_constants(params):
    rp = reduce(params)
    assert rp.t == pytest.approx(27.0 * 0.5 * 2.0 / 1.0)
    assert rp.h_plus == pytest.approx((3.0 + np.sqrt(9.0 + 8.0 * rp.t)) / 4.0)
    assert rp.s_plus == pytest.approx((1.0 + np.sqrt(1.0 + 24.0 * 0.5 * 2.0)) / 8.0)
    assert rp.R_t == pytest.approx(20.0 / rp.xi_b)


def test_h_plus_solves_its_quadratic():
    for t in (1.5, 9.0, 100.0, 1e4):
        h = h_plus_of(t)
        assert 2.0 * h * h == pytest.approx(t + 3.0 * h, rel=1e-14)


def test_h_plus_envelope():
    assert all(h_plus_envelope_holds(t) for t in (9.0, 100.0, 1e4, 1e6))


@pytest.mark.parametrize("bad", [{"a2": 0.0}, {"b2": -1.0}, {"c2": 0.0}, {"L": 0.0}, {"R0": -5.0}])
def test_non_positive_constants_rejected(bad):
    values = {"a2": 0.5, "b2": 1.0, "c2": 2.0, "L": 1.0, "R0": 10.0}
    values.update(bad)
    with pytest.raises(ParameterError):
        MaterialParams.build(**values)


def test_reduced_params_reject_bad_temperature():
    with pytest.raises(ParameterError):
        ReducedParams.from_temperature(0.0, 10.0)
    with pytest.raises(ParameterError):
        ReducedParams.from_temperature(10.0, -1.0)


def test_dimensional_minimum_maps_to_unit_norm(params):
    rp = reduce(params)
    # s_+ (n x n - I/3) has Frobenius norm sqrt(2/3) s_+
    q = from_uniaxial(np.sqrt(2.0 / 3.0) * rp.s_plus, [0.0, 0.0, 1.0])
    reduced = rescale_to_reduced(q, params, rp)
    assert np.linalg.norm(reduced) == pytest.approx(1.0, rel=1e-12)
    assert_allclose(reduced, reduction_factor(params, rp) * np.asarray(q), rtol=1e-15)


def test_reduced_bulk_vanishes_on_unit_uniaxial(rp100, rng):
    for _ in range(5):
        n = rng.standard_normal(3)
        q = from_uniaxial(1.0, n / np.linalg.norm(n))
        assert abs(bulk_f_reduced(q, rp100)) < 1e-13


def test_reduced_bulk_is_nonnegative(rp100, rng):
    q = random_qtensor(rng, size=10000, scale=0.7)
    assert np.min(bulk_f_reduced(q, rp100)) >= -1e-13


def test_uniaxial_bulk_dominates_lower_envelope(rp100):
    h = np.linspace(0.0, 1.5, 301)
    assert np.all(bulk_f_uniaxial(h, rp100) - bulk_lower_envelope(h) >= -1e-14)
    assert bulk_f_uniaxial(1.0, rp100) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("t", [9.0, 100.0, 1e4, 1e6])
def test_uniaxial_bulk_envelope_over_random_amplitudes(t, rng):
    rp = ReducedParams.from_temperature(t, 10.0)
    h = rng.uniform(0.0, 1.2, size=100_000)
    assert np.min(bulk_f_uniaxial(h, rp) - bulk_lower_envelope(h)) >= -1e-14


def test_uniaxial_bulk_matches_tensor_bulk(rp100):
    h = np.linspace(0.0, 1.2, 25)
    q = np.array([np.asarray(from_uniaxial(v, [1.0, 0.0, 0.0])) for v in h])
    assert_allclose(bulk_f_reduced(q, rp100), bulk_f_uniaxial(h, rp100), atol=1e-14)


def test_uniaxial_bulk_rejects_negative_amplitude(rp100):
    with pytest.raises(DomainError):
        bulk_f_uniaxial(-0.1, rp100)


def test_dimensional_bulk_is_rotation_invariant(params, rng):
    q = random_qtensor(rng, size=20)
    T = random_rotation(rng)
    assert_allclose(bulk_f_dimensional(rotate(q, T), params), bulk_f_dimensional(q, params), rtol=1e-11, atol=1e-13)


def test_dimensional_el_rhs_is_bulk_gradient(params, rng):
    q = random_qtensor(rng)
    grad = el_rhs_dimensional(q, params)
    step = 1e-6
    for k in range(5):
        e = np.zeros(5)
        e[k] = step
        fd = (bulk_f_dimensional(q + e, params) - bulk_f_dimensional(q - e, params)) / (2.0 * step)
        assert fd == pytest.approx(grad[k], rel=1e-6, abs=1e-8)
