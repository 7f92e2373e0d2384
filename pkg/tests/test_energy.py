# tests/test_energy.py

import numpy as np
import pytest

from tools.energy import (
    EnergyBreakdown,
    cube_singular_integral,
    director_dirichlet_energy,
    energy_compare_hedgehog_vs_perturbation,
    field_energy,
    harmonic_map_energy,
    monotonicity_scan,
    radial_energy,
)
from tools.errors import ConfigurationError, DomainError
from tools.fields import (
    BallField,
    core_biaxiality,
    harmonic_map_field,
    hedgehog_closure,
    lattice_mask,
    lattice_points,
    perturbation_closure,
    rotate_field_quarter,
    sample_ball_field,
)
from tools.hedgehog_ode import RadialProfile, solve_profile
from tools.material import ReducedParams
from tools.tensor_core import uniaxial_coeffs


@pytest.mark.parametrize("R", [1.0, 12.0, 50.0])
def test_director_energy_is_8piR(R):
    assert director_dirichlet_energy(R) == pytest.approx(8.0 * np.pi * R, rel=1e-12)


@pytest.mark.parametrize("R", [10.0, 50.0])
def test_harmonic_map_energy_is_12piR(R):
    rp = ReducedParams.from_temperature(100.0, R)
    energy = harmonic_map_energy(R, rp)
    assert energy.total == pytest.approx(12.0 * np.pi * R, rel=1e-8)
    assert abs(energy.bulk) < 1e-8


def test_cube_singular_integral_bounds():
    # inscribed ball below, equal-volume ball above
    K = cube_singular_integral()
    assert 2.0 * np.pi < K < 4.0 * np.pi * (3.0 / (4.0 * np.pi)) ** (1.0 / 3.0)


def test_radial_energy_breakdown(profile100, rp100):
    energy = radial_energy(profile100, rp100)
    assert energy.total == pytest.approx(energy.elastic + energy.bulk)
    assert energy.elastic > 0.0 and energy.bulk >= 0.0
    assert energy.quadrature_error_estimate < 1e-6 * energy.total
    assert set(energy.to_dict()) == {"elastic", "bulk", "total", "quadrature_error_estimate"}


def test_monotonicity_scan_ends_at_total(profile100, rp100):
    scan = monotonicity_scan(profile100, rp100, np.linspace(1.0, 50.0, 25))
    assert len(scan) == 25
    r_last, ratio_last = scan[-1]
    assert r_last == 50.0
    assert ratio_last * 50.0 == pytest.approx(radial_energy(profile100, rp100).total, rel=1e-10)


def test_monotonicity_scan_of_harmonic_profile_is_flat(rp100):
    one = RadialProfile.constant(1.0, 100.0, 50.0, 500)
    ratios = np.array([value for _, value in monotonicity_scan(one, rp100, [2.0, 10.0, 33.0, 50.0])])
    np.testing.assert_allclose(ratios, 12.0 * np.pi, rtol=1e-10)


def test_monotonicity_scan_rejects_bad_radii(profile100, rp100):
    with pytest.raises(DomainError):
        monotonicity_scan(profile100, rp100, [0.0, 1.0])
    with pytest.raises(DomainError):
        monotonicity_scan(profile100, rp100, [5.0, 2.0])
    with pytest.raises(DomainError):
        monotonicity_scan(profile100, rp100, [10.0, 60.0])


def test_field_energy_requires_resolution(profile_small, rp_small):
    F = sample_ball_field(hedgehog_closure(profile_small), 12.0, 100.0, 15)
    with pytest.raises(ConfigurationError):
        field_energy(F, rp_small)


def test_field_energy_approximates_radial_energy(profile_small, rp_small):
    F = sample_ball_field(hedgehog_closure(profile_small), 12.0, 100.0, 49, provenance="hedgehog")
    lattice = field_energy(F, rp_small)
    radial = radial_energy(profile_small, rp_small)
    assert lattice.total == pytest.approx(radial.total, rel=0.1)
    assert lattice.quadrature_error_estimate > 0.0
    assert lattice.bulk >= 0.0


def test_harmonic_map_lattice_energy(rp_small):
    F = sample_ball_field(harmonic_map_field, 8.0, 100.0, 33, provenance="harmonic_map")
    energy = field_energy(F, rp_small)
    assert energy.total == pytest.approx(12.0 * np.pi * 8.0, rel=0.1)


def test_richardson_needs_odd_lattice(profile_small, rp_small):
    F = sample_ball_field(hedgehog_closure(profile_small), 12.0, 100.0, 32)
    with pytest.raises(ConfigurationError):
        field_energy(F, rp_small)
    assert field_energy(F, rp_small, estimate_error=False).quadrature_error_estimate == 0.0


@pytest.mark.parametrize("axis", ["x", "y", "z"])
def test_field_energy_invariant_under_quarter_turns(profile_small, rp_small, axis):
    F = sample_ball_field(perturbation_closure(profile_small), 12.0, 100.0, 25, provenance="perturbed_hedgehog")
    E = field_energy(F, rp_small, estimate_error=False).total
    E_rot = field_energy(rotate_field_quarter(F, axis), rp_small, estimate_error=False).total
    assert E_rot == pytest.approx(E, rel=1e-12)


def test_energy_comparison_structure(profile_small, rp_small):
    result = energy_compare_hedgehog_vs_perturbation(profile_small, rp_small, 33)
    assert result.grid_n == 33
    assert result.delta == pytest.approx(result.perturbed.total - result.hedgehog.total)
    assert result.error_bar == pytest.approx(abs(result.delta - result.delta_coarse) / 3.0)
    assert result.significant == (abs(result.delta) > result.error_bar)
    assert isinstance(result.hedgehog, EnergyBreakdown)


@pytest.mark.slow
def test_harmonic_map_lattice_energy_within_3_percent():
    rp = ReducedParams.from_temperature(100.0, 20.0)
    F = sample_ball_field(harmonic_map_field, 20.0, 100.0, 65, provenance="harmonic_map")
    assert field_energy(F, rp).total == pytest.approx(12.0 * np.pi * 20.0, rel=0.03)



def test_monotonicity_scan_is_nondecreasing(profile100, rp100):
    scan = monotonicity_scan(profile100, rp100, np.linspace(0.5, 50.0, 50))
    ratios = np.array([value for _, value in scan])
    assert np.all(np.diff(ratios) >= -1e-12)


def test_zero_amplitude_perturbation_changes_nothing(profile_small, rp_small):
    result = energy_compare_hedgehog_vs_perturbation(profile_small, rp_small, 33, sigma=1e12, amplitude=0.0)
    assert result.delta == 0.0
    assert result.error_bar == 0.0
    assert not result.significant


def _bump_field(R: float, n: int, width: float = 1.5, amplitude: float = 0.3) -> BallField:
    # unit uniaxial background plus a gaussian bump that is negligible at |x| = R
    background = uniaxial_coeffs(1.0, np.array([0.0, 0.0, 1.0]))
    bump = uniaxial_coeffs(1.0, np.array([1.0, 0.0, 0.0]))
    pts = lattice_points(R, n)
    weight = amplitude * np.exp(-np.sum(pts * pts, axis=-1) / width**2)
    values = background + weight[..., None] * bump
    return BallField(values=values, mask=lattice_mask(R, n), R=R, t=100.0, provenance="custom")


def test_smooth_field_energy_converges_at_second_order(rp_small):
    energies = [field_energy(_bump_field(6.0, n), rp_small, estimate_error=False).total for n in (25, 49, 97)]
    coarse_gap = abs(energies[0] - energies[1])
    fine_gap = abs(energies[1] - energies[2])
    assert coarse_gap > 0.0
    assert fine_gap * 3.0 <= coarse_gap


@pytest.mark.slow
def test_hedgehog_lattice_energy_within_3_percent(profile_small, rp_small):
    F = sample_ball_field(hedgehog_closure(profile_small), 12.0, 100.0, 65, provenance="hedgehog")
    lattice = field_energy(F, rp_small, estimate_error=False)
    assert lattice.total == pytest.approx(radial_energy(profile_small, rp_small).total, rel=0.03)


@pytest.fixture(scope="module")
def profile_large_t():
    return solve_profile(1e4, 40.0, 2000)


@pytest.mark.slow
def test_perturbation_lowers_energy_beyond_error_bar(profile_large_t):
    rp = ReducedParams.from_temperature(1e4, 40.0)
    result = energy_compare_hedgehog_vs_perturbation(profile_large_t, rp, 65)
    assert result.delta < 0.0
    assert result.significant


@pytest.mark.slow
def test_perturbation_sign_is_stable_under_refinement(profile_large_t):
    rp = ReducedParams.from_temperature(1e4, 40.0)
    deltas = [energy_compare_hedgehog_vs_perturbation(profile_large_t, rp, n).delta for n in (33, 65)]
    assert np.sign(deltas[0]) == np.sign(deltas[1]) == -1.0


@pytest.mark.slow
def test_hedgehog_core_is_uniaxial(profile_large_t):
    F = sample_ball_field(hedgehog_closure(profile_large_t), 40.0, 1e4, 65, provenance="hedgehog")
    assert core_biaxiality(F, 5.0) < 1e-8
