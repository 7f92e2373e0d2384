# tools/energy.py

"""
Reduced Landau-de Gennes energy

    I[Q] = integral over B(0, R) of 1/2 |grad Q|^2 + f(Q)

by 1-D radial quadrature for radial profiles and by lattice sums for
BallFields. Lattice elastic energy is the edge sum 1/2 sum |Q_b - Q_a|^2 dx
over lattice edges touching the interior, whose gradient is the 7-point
Laplacian used by the relaxation.
"""

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy.integrate import dblquad

from config import MIN_GRID_NODES, PERTURBATION_SIGMA
from tools.errors import ConfigurationError, DomainError
from tools.fields import (
    BallField,
    INTERIOR,
    hedgehog_closure,
    perturbation_closure,
    sample_ball_field,
)
from tools.hedgehog_ode import RadialProfile
from tools.material import ReducedParams, bulk_f_reduced, bulk_f_uniaxial

GAUSS_POINTS = 8


@dataclass(frozen=True)
class EnergyBreakdown:
    elastic: float
    bulk: float
    total: float
    quadrature_error_estimate: float = 0.0

    @classmethod
    def of(cls, elastic: float, bulk: float, err: float = 0.0) -> "EnergyBreakdown":
        return cls(float(elastic), float(bulk), float(elastic + bulk), float(abs(err)))

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class EnergyComparison:
    """
    E_H and E_Hb on one lattice.

    Both fields coincide away from the core, so their discretisation errors
    largely cancel in the difference; the error bar is the Richardson estimate
    of delta itself, |delta(dx) - delta(2 dx)| / 3.
    """

    hedgehog: EnergyBreakdown
    perturbed: EnergyBreakdown
    grid_n: int
    delta_coarse: float

    @property
    def delta(self) -> float:
        return self.perturbed.total - self.hedgehog.total

    @property
    def error_bar(self) -> float:
        return abs(self.delta - self.delta_coarse) / 3.0

    @property
    def significant(self) -> bool:
        return abs(self.delta) > self.error_bar


# ----------------------------------------------------------------------
# Radial quadrature
# ----------------------------------------------------------------------
def _radial_densities(p: RadialProfile, rp: ReducedParams, r: np.ndarray):
    """Elastic and bulk integrands including the 4 pi r^2 shell factor."""
    h = p.spline(r)
    dh = p.spline(r, 1)
    elastic = 2.0 * np.pi * (dh * dh * r * r + 6.0 * h * h)
    bulk = 4.0 * np.pi * r * r * bulk_f_uniaxial(np.clip(h, 0.0, None), rp)
    return elastic, bulk


def _composite_gauss(p: RadialProfile, rp: ReducedParams, knots: np.ndarray, order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    lo, hi = knots[:-1], knots[1:]
    half = 0.5 * (hi - lo)
    r = 0.5 * (hi + lo)[:, None] + half[:, None] * x[None, :]
    elastic, bulk = _radial_densities(p, rp, r)
    seg_elastic = half * (elastic @ w)
    seg_bulk = half * (bulk @ w)
    return seg_elastic, seg_bulk


def radial_energy(p: RadialProfile, rp: ReducedParams) -> EnergyBreakdown:
    """
    Energy of the radial field with profile h on B(0, R).

    Each profile segment is integrated with 8-point Gauss-Legendre applied to
    the Hermite interpolant; the error estimate is the 8- vs 4-point gap.
    """
    knots = np.concatenate([[0.0], p.r])
    e8, b8 = _composite_gauss(p, rp, knots, GAUSS_POINTS)
    e4, b4 = _composite_gauss(p, rp, knots, GAUSS_POINTS // 2)
    elastic, bulk = float(np.sum(e8)), float(np.sum(b8))
    err = abs(elastic + bulk - float(np.sum(e4)) - float(np.sum(b4)))
    logger.debug(f"[energy] Radial energy t={p.t:g}, R={p.R:g}: elastic={elastic:.10g}, bulk={bulk:.10g}")
    return EnergyBreakdown.of(elastic, bulk, err)


def monotonicity_scan(
    p: RadialProfile, rp: ReducedParams, radii: Sequence[float]
) -> List[Tuple[float, float]]:
    """E(r)/r on balls centred at the origin; logs a warning when it decreases."""
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0 or radii[0] <= 0.0 or radii[-1] > p.R * (1.0 + 1e-12) or np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be strictly increasing within (0, R]")

    knots = np.concatenate([[0.0], p.r])
    seg_e, seg_b = _composite_gauss(p, rp, knots, GAUSS_POINTS)
    cumulative = np.concatenate([[0.0], np.cumsum(seg_e + seg_b)])

    scan = []
    for radius in radii:
        k = int(np.searchsorted(knots, radius, side="right")) - 1
        k = min(k, knots.size - 1)
        partial_e, partial_b = _composite_gauss(p, rp, np.array([knots[k], radius]), GAUSS_POINTS)
        energy = cumulative[k] + float(partial_e[0] + partial_b[0])
        scan.append((float(radius), energy / float(radius)))

    ratios = np.array([value for _, value in scan])
    if ratios.size > 1 and np.min(np.diff(ratios)) < -1e-10:
        logger.warning(
            f"[energy] Monotonicity scan decreases (min step {np.min(np.diff(ratios)):.3e}) for t={p.t:g}"
        )
    return scan


def director_dirichlet_energy(R: float, order: int = GAUSS_POINTS) -> float:
    """Integral of |grad(x/|x|)|^2 = 2/r^2 over B(0, R); equals 8 pi R."""
    x, w = np.polynomial.legendre.leggauss(order)
    r = 0.5 * R * (x + 1.0)
    integrand = (2.0 / r**2) * 4.0 * np.pi * r**2
    return float(0.5 * R * np.dot(w, integrand))


def harmonic_map_energy(R: float, rp: ReducedParams) -> EnergyBreakdown:
    """Energy of the profile h = 1; equals 12 pi R with zero bulk."""
    return radial_energy(RadialProfile.constant(1.0, rp.t, R), rp)


@lru_cache(maxsize=1)
def cube_singular_integral() -> float:
    """
    Integral of |u|^-2 over the unit cube centred at the origin.

    Splitting the cube into six pyramids over its faces reduces it to
    3 * integral over [-1/2, 1/2]^2 of 1 / (x^2 + y^2 + 1/4).
    """
    quarter, _ = dblquad(lambda y, x: 1.0 / (x * x + y * y + 0.25), 0.0, 0.5, 0.0, 0.5, epsabs=1e-13, epsrel=1e-13)
    return 12.0 * quarter


# ----------------------------------------------------------------------
# Lattice quadrature
# ----------------------------------------------------------------------
def edge_elastic_energy(F: BallField) -> float:
    interior = F.mask == INTERIOR
    total = 0.0
    for axis in range(3):
        diff = np.diff(F.values, axis=axis)
        touching = np.logical_or(
            np.take(interior, range(F.n - 1), axis=axis),
            np.take(interior, range(1, F.n), axis=axis),
        )
        total += float(np.sum(np.sum(diff * diff, axis=-1)[touching]))
    return 0.5 * F.dx * total


def bulk_density(F: BallField, rp: ReducedParams) -> np.ndarray:
    return np.asarray(bulk_f_reduced(F.values[F.mask == INTERIOR], rp))


def _field_energy(F: BallField, rp: ReducedParams) -> Tuple[float, float]:
    density = bulk_density(F, rp)
    if density.size and np.min(density) < -1e-12:
        logger.warning(f"[energy] Negative bulk density {np.min(density):.3e} on lattice")
    elastic = edge_elastic_energy(F)
    bulk = float(np.sum(density)) * F.dx**3

    if F.provenance == "harmonic_map" and F.n % 2 == 1:
        c = F.n // 2
        origin = F.values[c, c, c]
        neighbours = [
            F.values[c + 1, c, c], F.values[c - 1, c, c],
            F.values[c, c + 1, c], F.values[c, c - 1, c],
            F.values[c, c, c + 1], F.values[c, c, c - 1],
        ]
        removed = 0.5 * F.dx * sum(float(np.sum((q - origin) ** 2)) for q in neighbours)
        elastic += 3.0 * cube_singular_integral() * F.dx - removed
        bulk -= float(bulk_f_reduced(origin, rp)) * F.dx**3
    return elastic, bulk


def field_energy(F: BallField, rp: ReducedParams, estimate_error: bool = True) -> EnergyBreakdown:
    """
    Lattice energy of a BallField.

    Parameters
    ----------
    F : BallField
        Field with at least MIN_GRID_NODES nodes per axis.
    rp : ReducedParams
    estimate_error : bool
        Compare against the coarsened lattice (every second node) and report
        |E(dx) - E(2 dx)| / 3. Requires odd n.

    Notes
    -----
    Harmonic-map fields (provenance "harmonic_map") have an r^-2 energy
    singularity at the origin; the six origin edges are replaced by the exact
    integral of 1/2 |grad Q|^2 = 3/r^2 over the origin cell.
    """
    if F.n < MIN_GRID_NODES:
        raise ConfigurationError(f"grid too coarse: {F.n} nodes across the diameter (< {MIN_GRID_NODES})")
    elastic, bulk = _field_energy(F, rp)

    err = 0.0
    if estimate_error:
        coarse = F.coarsen()
        c_elastic, c_bulk = _field_energy(coarse, rp)
        err = abs(elastic + bulk - c_elastic - c_bulk) / 3.0
    logger.debug(
        f"[energy] Field energy '{F.provenance}' n={F.n}: elastic={elastic:.8g}, bulk={bulk:.8g}, err={err:.3g}"
    )
    return EnergyBreakdown.of(elastic, bulk, err)


def energy_compare_hedgehog_vs_perturbation(
    p: RadialProfile,
    rp: ReducedParams,
    grid_n: int,
    sigma: float = PERTURBATION_SIGMA,
    amplitude: float = 1.0,
) -> EnergyComparison:
    """Energies of the hedgehog and its biaxial perturbation on the same lattice."""
    hedgehog = sample_ball_field(hedgehog_closure(p), p.R, p.t, grid_n, provenance="hedgehog")
    perturbed = sample_ball_field(
        perturbation_closure(p, sigma=sigma, amplitude=amplitude),
        p.R,
        p.t,
        grid_n,
        provenance="perturbed_hedgehog",
    )
    E_H = field_energy(hedgehog, rp)
    E_Hb = field_energy(perturbed, rp)
    coarse_h = sum(_field_energy(hedgehog.coarsen(), rp))
    coarse_hb = sum(_field_energy(perturbed.coarsen(), rp))
    result = EnergyComparison(
        hedgehog=E_H,
        perturbed=E_Hb,
        grid_n=grid_n,
        delta_coarse=float(coarse_hb - coarse_h),
    )
    logger.info(
        f"[energy] n={grid_n}: E_H={result.hedgehog.total:.8g}, E_Hb={result.perturbed.total:.8g}, "
        f"dE={result.delta:.4g} +/- {result.error_bar:.2g}"
    )
    return result
