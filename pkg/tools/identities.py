# tools/identities.py

"""
Quadrature checks of the integral identities behind the defect analysis:
sphere moments, the cancellation for quadratic Taylor tensors B, the conserved
flux of the division-trick field S = Q/h, and the annulus balance of that flux.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, List, Optional, Tuple

import numpy as np
from loguru import logger

from config import FD_STEP, QUADRATURE_ORDER, RANDOM_SEED
from tools.energy import director_dirichlet_energy, harmonic_map_energy
from tools.errors import DomainError, PreconditionError
from tools.fields import (
    Closure,
    flux_phi,
    fd_gradient,
    hedgehog_closure,
    s_closure,
)
from tools.hedgehog_ode import RadialProfile, interpolate_h
from tools.material import (
    MaterialParams,
    ReducedParams,
    bulk_f_dimensional,
    bulk_f_reduced,
    bulk_f_uniaxial,
    bulk_lower_envelope,
    el_rhs_dimensional,
    reduction_factor,
    rescale_to_reduced,
)
from tools.relax3d import el_rhs, reduced_hedgehog_residual, uniaxial_rhs
from tools.sphere_quadrature import sphere_rule
from tools.tensor_core import norm_sq, random_qtensor, uniaxial_coeffs

BTENSOR_TOL = 1e-14
PROJECTION_SWEEPS = 3
EYE = np.eye(3)


@dataclass(frozen=True, eq=False)
class BTensor:
    """Rank-4 array B[i, j, alpha, beta]."""

    array: np.ndarray

    def violations(self) -> Tuple[float, float, float, float]:
        """Sup-norms of the (ij) and (alpha beta) asymmetries and both traces."""
        b = self.array
        return (
            float(np.max(np.abs(b - b.transpose(1, 0, 2, 3)))),
            float(np.max(np.abs(b - b.transpose(0, 1, 3, 2)))),
            float(np.max(np.abs(np.einsum("iiab->ab", b)))),
            float(np.max(np.abs(np.einsum("ijaa->ij", b)))),
        )

    @property
    def admissible(self) -> bool:
        return max(self.violations()) < BTENSOR_TOL


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    value: float
    tolerance: float
    passed: bool

    @classmethod
    def at_most(cls, name: str, value: float, tolerance: float) -> "IdentityCheck":
        value = float(value)
        return cls(name=name, value=value, tolerance=tolerance, passed=bool(value <= tolerance))


# ----------------------------------------------------------------------
# B tensors
# ----------------------------------------------------------------------
def project_btensor(array) -> BTensor:
    """Symmetrise both index pairs and remove both traces."""
    b = np.array(array, dtype=float).reshape(3, 3, 3, 3)
    for sweep in range(1, PROJECTION_SWEEPS + 1):
        b = 0.5 * (b + b.transpose(1, 0, 2, 3))
        b = 0.5 * (b + b.transpose(0, 1, 3, 2))
        b = b - np.einsum("ij,ab->ijab", EYE, np.einsum("kkab->ab", b)) / 3.0
        b = b - np.einsum("ij,ab->ijab", np.einsum("ijcc->ij", b), EYE) / 3.0
        tensor = BTensor(b)
        if tensor.admissible:
            return tensor
    raise PreconditionError(f"B projection did not converge in {PROJECTION_SWEEPS} sweeps: {tensor.violations()}")


def random_btensor(seed: int) -> BTensor:
    rng = np.random.default_rng(seed)
    return project_btensor(rng.standard_normal((3, 3, 3, 3)))


# ----------------------------------------------------------------------
# Sphere moments
# ----------------------------------------------------------------------
def sphere_moment2(order: int = QUADRATURE_ORDER) -> np.ndarray:
    rule = sphere_rule(order)
    return np.einsum("m,mq,ms->qs", rule.weights, rule.points, rule.points)


def sphere_moment4(order: int = QUADRATURE_ORDER) -> np.ndarray:
    rule = sphere_rule(order)
    x = rule.points
    return np.einsum("m,mp,mq,mr,ms->pqrs", rule.weights, x, x, x, x)


def moment4_exact() -> np.ndarray:
    d = EYE
    return (4.0 * np.pi / 15.0) * (
        np.einsum("pq,rs->pqrs", d, d) + np.einsum("pr,qs->pqrs", d, d) + np.einsum("ps,qr->pqrs", d, d)
    )


def lemma_b_value(B: BTensor, order: int = 12, check: bool = True) -> Tuple[float, float]:
    """
    Integral over the unit sphere of 1/2 |grad P|^2 - 3 |P|^2 / |x|^2 for
    P_ij = B_ijab x_a x_b / |x|^2, using the analytic gradient.

    Returns
    -------
    (quadrature value, closed form
     (4 pi/3)[2 B_ijrs B_ijrs - B_ijpp B_ijss - 2 B_ijqr B_ijrq])

    With check=False only the trace constraints may be violated; both
    symmetries are still required by the closed form.
    """
    b = np.asarray(B.array, dtype=float)
    if check and not B.admissible:
        raise PreconditionError(f"B violates its constraints: {B.violations()}")
    if not check and max(B.violations()[:2]) >= BTENSOR_TOL:
        raise PreconditionError("B must stay symmetric in both index pairs")

    rule = sphere_rule(order)
    x = rule.points
    bx = np.einsum("ijab,mb->mija", b, x)
    p = np.einsum("mija,ma->mij", bx, x)
    # on |x| = 1: 1/2|grad P|^2 = 2(|Bx|^2 - |P|^2)
    integrand = 2.0 * np.sum(bx * bx, axis=(1, 2, 3)) - 5.0 * np.sum(p * p, axis=(1, 2))
    value = float(np.dot(rule.weights, integrand))

    closed = (4.0 * np.pi / 3.0) * (
        2.0 * np.einsum("ijrs,ijrs->", b, b)
        - np.einsum("ijpp,ijss->", b, b)
        - 2.0 * np.einsum("ijqr,ijrq->", b, b)
    )
    return value, float(closed)


# ----------------------------------------------------------------------
# Flux field Phi and its balance
# ----------------------------------------------------------------------
def damped_director_closure(amplitude: float = 0.01) -> Closure:
    """Synthetic S = (1 - amplitude e^{-r}) sqrt(3/2)(x^ x x^ - I/3); |S| < 1 away from infinity."""

    def closure(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        unit = x / r[..., None]
        return uniaxial_coeffs(1.0 - amplitude * np.exp(-r), unit)

    return closure


def _s_derivatives(S: Closure, x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    s = np.asarray(S(x))
    grad = fd_gradient(S, x, FD_STEP * r)
    unit = x / r[..., None]
    d_r = np.einsum("...k,...kc->...c", unit, grad)
    return r, unit, s, grad, d_r


def phi_vector(S: Closure, p: RadialProfile, x: np.ndarray) -> np.ndarray:
    """Phi_p(x) for p = 1..3, shape (..., 3)."""
    x = np.asarray(x, dtype=float)
    r, unit, s, grad, d_r = _s_derivatives(S, x)
    h, _ = interpolate_h(p, r)
    defect = 1.0 - norm_sq(s)
    scalar = (
        0.5 * np.sum(grad * grad, axis=(-2, -1))
        + (1.0 + p.kappa) * h * h * defect**2 / 4.0
        + 3.0 * defect / r**2
    )
    return scalar[..., None] * unit - np.einsum("...c,...pc->...p", d_r, grad)


def phi_divergence(S: Closure, p: RadialProfile, x: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(x, axis=-1)
    jac = fd_gradient(partial(phi_vector, S, p), x, 10.0 * FD_STEP * r)
    return np.einsum("...kk->...", jac)


def balance_rhs(S: Closure, p: RadialProfile, x: np.ndarray) -> np.ndarray:
    """Right side of the divergence identity satisfied by solutions of the S-equation."""
    x = np.asarray(x, dtype=float)
    r, _, s, _, d_r = _s_derivatives(S, x)
    h, dh = interpolate_h(p, r)
    s_norm_sq = norm_sq(s)
    d_r_sq = np.sum(d_r * d_r, axis=-1)
    return (
        d_r_sq / r
        + (1.0 + p.kappa) * (1.0 - s_norm_sq) ** 2 / 4.0 * (2.0 * h * dh + 2.0 * h * h / r)
        + 2.0 * dh / h * d_r_sq
        - p.kappa * h * (1.0 - np.sqrt(s_norm_sq)) * np.sum(s * d_r, axis=-1)
    )


def _annulus_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    delta: float,
    R: float,
    order: int,
    segments: int,
) -> float:
    x, w = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(delta, R, segments + 1)
    half = 0.5 * np.diff(edges)
    radii = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * x[None, :]).reshape(-1)
    radial_w = (half[:, None] * w[None, :]).reshape(-1) * radii**2
    rule = sphere_rule(order)
    pts = radii[:, None, None] * rule.points[None, :, :]
    values = np.asarray(integrand(pts.reshape(-1, 3))).reshape(radii.size, -1)
    return float(radial_w @ (values @ rule.weights))


def flux_divergence_check(
    S: Closure,
    p: RadialProfile,
    rp: ReducedParams,
    delta: float,
    R: float,
    order: int = 12,
    segments: int = 16,
) -> Tuple[float, float]:
    """
    Divergence theorem for Phi on delta <= |x| <= R.

    Returns
    -------
    (flux(R) - flux(delta), volume integral of div Phi by nested differences)
    """
    if not 0.0 < delta < R <= p.R:
        raise DomainError(f"need 0 < delta < R <= {p.R:g}, got delta={delta:g}, R={R:g}")
    outer = flux_phi(S, p, R, order).flux
    inner = flux_phi(S, p, delta, order).flux
    volume = _annulus_integral(partial(phi_divergence, S, p), delta, R, order, segments)
    logger.debug(f"[identities] Flux difference {outer - inner:.6e} vs volume divergence {volume:.6e}")
    return outer - inner, volume


def pohozaev_balance(
    p: RadialProfile,
    rp: ReducedParams,
    delta: float,
    R: float,
    S: Optional[Closure] = None,
    order: int = 12,
    segments: int = 16,
) -> Tuple[float, float]:
    """
    (lhs, rhs) of the annulus balance for S = Q/h (the hedgehog by default).

    lhs is the flux difference of Phi between |x| = R and |x| = delta; rhs is
    the volume integral of the right side of the divergence identity.
    """
    if not 0.0 < delta < R <= p.R:
        raise DomainError(f"need 0 < delta < R <= {p.R:g}, got delta={delta:g}, R={R:g}")
    if S is None:
        S = s_closure(hedgehog_closure(p), p)
    lhs = flux_phi(S, p, R, order).flux - flux_phi(S, p, delta, order).flux
    rhs = _annulus_integral(partial(balance_rhs, S, p), delta, R, order, segments)
    return lhs, rhs


# ----------------------------------------------------------------------
# Suite
# ----------------------------------------------------------------------
def _moment_checks(order: int) -> List[IdentityCheck]:
    m2 = np.max(np.abs(sphere_moment2(order) - 4.0 * np.pi / 3.0 * EYE))
    m4 = np.max(np.abs(sphere_moment4(order) - moment4_exact()))
    return [IdentityCheck.at_most("sphere_moment2", m2, 1e-12), IdentityCheck.at_most("sphere_moment4", m4, 1e-12)]


def _lemma_b_checks(seed: int, n_seeds: int, order: int) -> List[IdentityCheck]:
    worst_value = worst_gap = worst_violation = 0.0
    for k in range(n_seeds):
        B = random_btensor(seed + k)
        value, closed = lemma_b_value(B, order)
        worst_value = max(worst_value, abs(value))
        worst_gap = max(worst_gap, abs(value - closed))
        worst_violation = max(worst_violation, max(B.violations()))
    return [
        IdentityCheck.at_most("btensor_constraints", worst_violation, BTENSOR_TOL),
        IdentityCheck.at_most("lemma_b", worst_value, 1e-10),
        IdentityCheck.at_most("lemma_b_closed_form", worst_gap, 1e-9),
    ]


def _flux_checks(p: RadialProfile, order: int) -> List[IdentityCheck]:
    S = s_closure(hedgehog_closure(p), p)
    radii = [d for d in (0.05, 0.5, 5.0) if d * (1.0 + 2.0 * FD_STEP) < p.R]
    worst = max(abs(flux_phi(S, p, d, order).flux - 12.0 * np.pi) for d in radii)
    return [IdentityCheck.at_most("flux_12pi", worst, 1e-6)]


def _balance_checks(p: RadialProfile, rp: ReducedParams) -> List[IdentityCheck]:
    outer = min(10.0, 0.5 * p.R)
    lhs, rhs = pohozaev_balance(p, rp, 0.5, outer)
    diff, volume = flux_divergence_check(damped_director_closure(), p, rp, 0.5, min(5.0, outer))
    return [
        IdentityCheck.at_most("pohozaev_hedgehog", max(abs(lhs), abs(rhs)), 1e-8),
        IdentityCheck.at_most("flux_divergence", abs(diff - volume), 1e-4 * 12.0 * np.pi),
    ]


def _bulk_checks(seed: int) -> List[IdentityCheck]:
    h = np.random.default_rng(seed).uniform(0.0, 1.0, 100000)
    margin = 0.0
    for t in (10.0, 1e2, 1e4, 1e8):
        rp = ReducedParams.from_temperature(t, 1.0)
        margin = max(margin, float(np.max(bulk_lower_envelope(h) - bulk_f_uniaxial(h, rp))))
    return [IdentityCheck.at_most("bulk_lower_envelope", max(margin, 0.0), 1e-14)]


def _el_checks(p: RadialProfile, rp: ReducedParams, seed: int) -> List[IdentityCheck]:
    rng = np.random.default_rng(seed)
    n = rng.standard_normal((100000, 3))
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    q = uniaxial_coeffs(rng.uniform(0.0, 1.2, 100000), n)
    gap = float(np.max(np.abs(el_rhs(q, rp) - uniaxial_rhs(q, rp))))
    return [
        IdentityCheck.at_most("el_uniaxial_consistency", gap, 1e-12),
        IdentityCheck.at_most("hedgehog_reduced_residual", reduced_hedgehog_residual(p, rp), 1e-8),
    ]


def _material_checks(p: MaterialParams, rp: ReducedParams, seed: int) -> List[IdentityCheck]:
    """Reduced bulk force and density against their dimensional forms under Q -> lambda Q."""
    lam = reduction_factor(p, rp)
    q = random_qtensor(np.random.default_rng(seed), size=100000, scale=rp.s_plus)
    reduced = rescale_to_reduced(q, p, rp)

    force = lam * el_rhs_dimensional(q, p) / p.a2
    el_gap = np.max(np.abs(el_rhs(reduced, rp) - force)) / np.max(np.abs(force))
    density = bulk_f_dimensional(q, p)
    scaled = p.a2 / lam**2 * (bulk_f_reduced(reduced, rp) - rp.C_t)
    bulk_gap = np.max(np.abs(scaled - density)) / np.max(np.abs(density))
    return [
        IdentityCheck.at_most("dimensional_el_scaling", el_gap, 1e-10),
        IdentityCheck.at_most("dimensional_bulk_scaling", bulk_gap, 1e-10),
    ]


def _energy_checks(rp: ReducedParams) -> List[IdentityCheck]:
    worst_q = max(abs(harmonic_map_energy(R, rp).total / (12.0 * np.pi * R) - 1.0) for R in (5.0, 10.0, 20.0))
    worst_n = max(abs(director_dirichlet_energy(R) / (8.0 * np.pi * R) - 1.0) for R in (5.0, 10.0, 20.0))
    return [
        IdentityCheck.at_most("harmonic_map_energy_12piR", worst_q, 1e-8),
        IdentityCheck.at_most("director_energy_8piR", worst_n, 1e-8),
    ]


def run_identity_suite(
    p: RadialProfile,
    rp: ReducedParams,
    seed: int = RANDOM_SEED,
    n_seeds: int = 100,
    order: int = QUADRATURE_ORDER,
    threads: int = 1,
    material: Optional[MaterialParams] = None,
) -> List[IdentityCheck]:
    """
    Run every identity check; results come back in a fixed order whatever
    the thread count. Material constants add the dimensional scaling checks
    after the reduced ones.
    """
    sphere_rule(order)
    tasks = [
        partial(_moment_checks, order),
        partial(_lemma_b_checks, seed, n_seeds, max(order, 6)),
        partial(_flux_checks, p, order),
        partial(_balance_checks, p, rp),
        partial(_bulk_checks, seed),
        partial(_el_checks, p, rp, seed),
        partial(_energy_checks, rp),
    ]
    if material is not None:
        tasks.append(partial(_material_checks, material, rp, seed))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            futures = [executor.submit(task) for task in tasks]
            groups = [future.result() for future in futures]
    else:
        groups = [task() for task in tasks]

    checks = [check for group in groups for check in group]
    for check in checks:
        level = "INFO" if check.passed else "WARNING"
        logger.log(level, f"[identities] {check.name}: {check.value:.3e} (tol {check.tolerance:.0e}) {'PASS' if check.passed else 'FAIL'}")
    return checks
