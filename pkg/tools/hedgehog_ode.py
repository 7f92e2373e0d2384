# tools/hedgehog_ode.py

"""
Radial-hedgehog profile solver.

The profile h(r) solves

    h'' + 2 h'/r - 6 h/r^2 = h^3 - h + (3 h_+/t) (h^3 - h^2),   h(0) = 0,

on (0, R], closed at r = R by the linearised far field
h(R) = 1 - 6 / ((2 + 3 h_+/t) R^2). Nodes r_i = R (i/N)^2 cluster at the
origin; three-point nonuniform differences give a tridiagonal Newton system
solved with scipy's banded solver.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Tuple

import numpy as np
import pandas as pd
from loguru import logger
from scipy.interpolate import CubicHermiteSpline
from scipy.linalg import solve_banded

from config import (
    DECAY_CAP,
    DERIVATIVE_CAPS,
    ENVELOPE_CORE,
    ENVELOPE_INNER,
    NEWTON_MAX_ITER,
    NEWTON_MIN_DAMPING,
    NEWTON_RESIDUAL_TOL,
    NEWTON_UPDATE_TOL,
    PROFILE_MIN_NODES,
    PROFILE_MIN_R,
    PROFILE_MIN_T,
    PROFILE_NODES,
)
from tools.errors import ConfigurationError, DomainError, ParameterError, SolverFailureError
from tools.material import h_plus_of


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Profile values on the grid r_i = R (i/N)^2, i = 1..N.

    `h_origin` is the value at r = 0 (0 for solved profiles). Node r = 0 is
    not part of `r`; it enters only through interpolation and the stencils.
    """

    r: np.ndarray
    h: np.ndarray
    dh: np.ndarray
    d2h0: float
    t: float
    R: float
    h_origin: float = 0.0
    iterations: int = field(default=0)

    @property
    def N(self) -> int:
        return int(self.r.shape[0])

    @property
    def kappa(self) -> float:
        """Cubic coupling 3 h_+ / t."""
        return 3.0 * h_plus_of(self.t) / self.t

    @cached_property
    def spline(self) -> CubicHermiteSpline:
        knots = np.concatenate([[0.0], self.r])
        values = np.concatenate([[self.h_origin], self.h])
        slopes = np.concatenate([[0.0], self.dh])
        return CubicHermiteSpline(knots, values, slopes)

    @classmethod
    def constant(cls, value: float, t: float, R: float, N: int = PROFILE_NODES) -> "RadialProfile":
        r = profile_grid(R, N)
        return cls(
            r=r,
            h=np.full(N, float(value)),
            dh=np.zeros(N),
            d2h0=0.0,
            t=t,
            R=R,
            h_origin=float(value),
        )

    @classmethod
    def from_function(
        cls, fn: Callable[[np.ndarray], np.ndarray], t: float, R: float, N: int = PROFILE_NODES
    ) -> "RadialProfile":
        """Sample an arbitrary radial function; derivatives come from the solver stencils."""
        r = profile_grid(R, N)
        h = np.asarray(fn(r), dtype=float)
        h_origin = float(np.asarray(fn(np.array([0.0])), dtype=float)[0])
        nodes = np.concatenate([[0.0], r])
        values = np.concatenate([[h_origin], h])
        return cls(
            r=r,
            h=h,
            dh=_first_derivative(nodes, values),
            d2h0=_origin_curvature(r, h - h_origin),
            t=t,
            R=R,
            h_origin=h_origin,
        )


# ----------------------------------------------------------------------
# Discretisation
# ----------------------------------------------------------------------
def profile_grid(R: float, N: int) -> np.ndarray:
    s = np.arange(1, N + 1, dtype=float) / N
    return R * s * s


def far_field_value(t: float, R: float) -> float:
    return 1.0 - 6.0 / ((2.0 + 3.0 * h_plus_of(t) / t) * R * R)


@dataclass(frozen=True, eq=False)
class RadialStencil:
    """Operator h'' + 2h'/r - 6h/r^2 on interior nodes as (lower, diag, upper) weights."""

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    d2: Tuple[np.ndarray, np.ndarray, np.ndarray]


def radial_stencil(nodes: np.ndarray) -> RadialStencil:
    rm, rc, rp = nodes[:-2], nodes[1:-1], nodes[2:]
    a = rc - rm
    b = rp - rc
    d2 = (2.0 / (a * (a + b)), -2.0 / (a * b), 2.0 / (b * (a + b)))
    d1 = (-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b)))
    return RadialStencil(
        lower=d2[0] + 2.0 * d1[0] / rc,
        diag=d2[1] + 2.0 * d1[1] / rc - 6.0 / rc**2,
        upper=d2[2] + 2.0 * d1[2] / rc,
        d2=d2,
    )


def _first_derivative(nodes: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Central three-point slopes at interior nodes, one-sided second order at r = R."""
    rm, rc, rp = nodes[:-2], nodes[1:-1], nodes[2:]
    a = rc - rm
    b = rp - rc
    hm, hc, hp = values[:-2], values[1:-1], values[2:]
    interior = -b / (a * (a + b)) * hm + (b - a) / (a * b) * hc + a / (b * (a + b)) * hp

    a_end = nodes[-2] - nodes[-3]
    b_end = nodes[-1] - nodes[-2]
    end = (
        b_end / (a_end * (a_end + b_end)) * values[-3]
        - (a_end + b_end) / (a_end * b_end) * values[-2]
        + (a_end + 2.0 * b_end) / (b_end * (a_end + b_end)) * values[-1]
    )
    return np.concatenate([interior, [end]])


def _origin_curvature(r: np.ndarray, h: np.ndarray) -> float:
    """h''(0) from the fit h = alpha r^2 + beta r^4 through the first two nodes."""
    r1, r2 = r[0] ** 2, r[1] ** 2
    alpha = (h[0] * r2 * r2 - h[1] * r1 * r1) / (r1 * r2 * r2 - r2 * r1 * r1)
    return float(2.0 * alpha)


def _bulk_force(h: np.ndarray, kappa: float) -> np.ndarray:
    return h**3 - h + kappa * (h**3 - h * h)


def _bulk_force_prime(h: np.ndarray, kappa: float) -> np.ndarray:
    return 3.0 * h * h - 1.0 + kappa * (3.0 * h * h - 2.0 * h)


def _residual(values: np.ndarray, st: RadialStencil, kappa: float) -> np.ndarray:
    hm, hc, hp = values[:-2], values[1:-1], values[2:]
    return st.lower * hm + st.diag * hc + st.upper * hp - _bulk_force(hc, kappa)


# ----------------------------------------------------------------------
# Solver
# ----------------------------------------------------------------------
def solve_profile(t: float, R: float, N: int = PROFILE_NODES) -> RadialProfile:
    """
    Solve the hedgehog profile equation by damped Newton iteration.

    Parameters
    ----------
    t : float
        Reduced temperature, t > 1.
    R : float
        Domain radius in reduced units, R >= 10.
    N : int
        Number of grid nodes, N >= 200.

    Returns
    -------
    RadialProfile

    Raises
    ------
    SolverFailureError
        When the iteration does not reach the update and residual tolerances.
    """
    if not t > PROFILE_MIN_T:
        raise ParameterError(f"profile solver needs t > {PROFILE_MIN_T}, got t={t}")
    if R < PROFILE_MIN_R:
        raise ParameterError(f"profile solver needs R >= {PROFILE_MIN_R}, got R={R}")
    if N < PROFILE_MIN_NODES:
        raise ConfigurationError(f"profile solver needs N >= {PROFILE_MIN_NODES}, got N={N}")

    kappa = 3.0 * h_plus_of(t) / t
    r = profile_grid(R, N)
    nodes = np.concatenate([[0.0], r])
    st = radial_stencil(nodes)

    values = np.empty(N + 1)
    values[0] = 0.0
    values[1:-1] = r[:-1] ** 2 / (r[:-1] ** 2 + 3.0)
    values[-1] = far_field_value(t, R)

    banded = np.zeros((3, N - 1))
    banded[0, 1:] = st.upper[:-1]
    banded[2, :-1] = st.lower[1:]

    g = _residual(values, st, kappa)
    g_norm = float(np.max(np.abs(g)))
    for iteration in range(1, NEWTON_MAX_ITER + 1):
        banded[1] = st.diag - _bulk_force_prime(values[1:-1], kappa)
        delta = solve_banded((1, 1), banded, -g)

        damping = 1.0
        while True:
            trial = values.copy()
            trial[1:-1] += damping * delta
            g_trial = _residual(trial, st, kappa)
            trial_norm = float(np.max(np.abs(g_trial)))
            if trial_norm <= g_norm or trial_norm < NEWTON_RESIDUAL_TOL or damping <= NEWTON_MIN_DAMPING:
                break
            damping *= 0.5

        if not np.isfinite(trial_norm):
            raise SolverFailureError("profile Newton iteration produced non-finite values", g_norm, iteration)

        values, g, g_norm = trial, g_trial, trial_norm
        update = damping * float(np.max(np.abs(delta)))
        logger.debug(
            f"[hedgehog_ode] iter {iteration}: residual={g_norm:.3e}, update={update:.3e}, damping={damping:g}"
        )
        if update < NEWTON_UPDATE_TOL and g_norm < NEWTON_RESIDUAL_TOL:
            break
    else:
        raise SolverFailureError(
            f"profile Newton iteration did not converge for t={t:g}, R={R:g}, N={N}",
            g_norm,
            NEWTON_MAX_ITER,
        )

    h = values[1:]
    profile = RadialProfile(
        r=r,
        h=h,
        dh=_first_derivative(nodes, values),
        d2h0=_origin_curvature(r, h),
        t=t,
        R=R,
        iterations=iteration,
    )
    logger.info(
        f"[hedgehog_ode] Solved t={t:g}, R={R:g}, N={N} in {iteration} iterations "
        f"(residual={g_norm:.3e}, h''(0)={profile.d2h0:.6f})"
    )
    if np.min(h) < 0.0 or np.max(h) > 1.0 or np.min(np.diff(h)) < -1e-12:
        logger.warning("[hedgehog_ode] Solved profile leaves [0, 1] or is not monotone.")
    return profile


# ----------------------------------------------------------------------
# Diagnostics
# ----------------------------------------------------------------------
def nodal_residual(p: RadialProfile) -> np.ndarray:
    """Discrete residual at every node; zero at the Dirichlet node r = R."""
    nodes = np.concatenate([[0.0], p.r])
    values = np.concatenate([[p.h_origin], p.h])
    g = _residual(values, radial_stencil(nodes), p.kappa)
    return np.concatenate([g, [0.0]])


def profile_residual(p: RadialProfile) -> float:
    return float(np.max(np.abs(nodal_residual(p))))


def interpolate_h(p: RadialProfile, r):
    """
    C^1 Hermite interpolant of (h, h') through the nodes and the origin.

    Returns
    -------
    (h, dh) with the shape of `r`.
    """
    r = np.asarray(r, dtype=float)
    slack = 1e-12 * p.R
    if np.any(r < -slack) or np.any(r > p.R + slack):
        raise DomainError(f"radius outside [0, {p.R}]: [{np.min(r):.6g}, {np.max(r):.6g}]")
    r = np.clip(r, 0.0, p.R)
    h = p.spline(r)
    dh = p.spline(r, 1)
    if r.ndim == 0:
        return float(h), float(dh)
    return h, dh


def second_derivative(p: RadialProfile) -> np.ndarray:
    """h'' at interior nodes from the solver stencil."""
    nodes = np.concatenate([[0.0], p.r])
    values = np.concatenate([[p.h_origin], p.h])
    w = radial_stencil(nodes).d2
    return w[0] * values[:-2] + w[1] * values[1:-1] + w[2] * values[2:]


def decay_check(p: RadialProfile) -> float:
    """sup over r in [R/2, R] of |h'(r)| r^3."""
    if p.R < 20.0:
        logger.warning(f"[hedgehog_ode] Decay constant requested for small domain R={p.R:g}")
    sel = p.r >= 0.5 * p.R
    return float(np.max(np.abs(p.dh[sel]) * p.r[sel] ** 3))


def derivative_bounds(p: RadialProfile) -> Tuple[float, float]:
    """(sup |h'|, sup |h''|) over the grid, including h''(0)."""
    sup_dh = float(np.max(np.abs(p.dh)))
    sup_d2h = float(max(np.max(np.abs(second_derivative(p))), abs(p.d2h0)))
    return sup_dh, sup_d2h


def envelope_report(p: RadialProfile) -> Dict[str, Dict[str, float]]:
    """Checks of the profile against its analytic bounds, each with a pass flag."""
    lower = p.r**2 / (p.r**2 + ENVELOPE_CORE)
    inner = p.r <= 1.0
    residual = profile_residual(p)
    decay = decay_check(p)
    sup_dh, sup_d2h = derivative_bounds(p)

    lower_margin = float(np.min(p.h - lower))
    upper_margin = float(np.min(1.0 - p.h))
    inner_margin = float(np.min(p.h[inner] - p.r[inner] ** 2 / ENVELOPE_INNER)) if inner.any() else 0.0
    monotone = float(np.min(np.diff(p.h)))

    report = {
        "lower_envelope": {"value": lower_margin, "passed": lower_margin >= -1e-12},
        "upper_bound": {"value": upper_margin, "passed": upper_margin >= -1e-12},
        "inner_envelope": {"value": inner_margin, "passed": inner_margin >= -1e-12},
        "monotone": {"value": monotone, "passed": monotone >= -1e-12},
        "d2h0_positive": {"value": p.d2h0, "passed": p.d2h0 > 0.0},
        "residual": {"value": residual, "passed": residual < NEWTON_RESIDUAL_TOL},
        "decay_constant": {"value": decay, "passed": decay <= DECAY_CAP},
        "sup_dh": {"value": sup_dh, "passed": sup_dh <= DERIVATIVE_CAPS[0]},
        "sup_d2h": {"value": sup_d2h, "passed": sup_d2h <= DERIVATIVE_CAPS[1]},
    }
    failed = [name for name, entry in report.items() if not entry["passed"]]
    if failed:
        logger.warning(f"[hedgehog_ode] Envelope checks failed: {', '.join(failed)}")
    return report


def profile_frame(p: RadialProfile) -> pd.DataFrame:
    return pd.DataFrame({"r": p.r, "h": p.h, "dh": p.dh, "residual": nodal_residual(p)})
