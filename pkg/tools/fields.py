# tools/fields.py

"""
Q-tensor fields on the ball B(0, R).

Field closures map points of shape (..., 3) to coefficients of shape (..., 5);
called with a single 3-vector they return a QTensor. `BallField` samples a
closure on a cubic lattice, with the radial anchoring Q_b held fixed outside
the open interior.
"""

from dataclasses import dataclass
from functools import cached_property, partial
from typing import Callable, Dict, Union

import numpy as np
import pandas as pd
from loguru import logger
from scipy.interpolate import RegularGridInterpolator
from scipy.ndimage import binary_dilation

from config import FD_STEP, PERTURBATION_SIGMA, QUADRATURE_ORDER, R_MIN_FRACTION
from tools.errors import ConfigurationError, DomainError, NearSingularError, SingularPointError
from tools.hedgehog_ode import RadialProfile, interpolate_h
from tools.sphere_quadrature import integrate_sphere
from tools.tensor_core import QTensor, biaxiality, norm_sq, rotate, uniaxial_coeffs

Closure = Callable[[np.ndarray], Union[np.ndarray, QTensor]]

INTERIOR, BOUNDARY, EXTERIOR = 0, 1, 2

# z x z - I/3 in coefficients
Z_PROJECTOR = np.array([0.0, np.sqrt(2.0 / 3.0), 0.0, 0.0, 0.0])

QUARTER_TURNS = {
    "x": np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]),
    "y": np.array([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]]),
    "z": np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]),
}


def _points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError(f"points must have a trailing axis of length 3, got shape {x.shape}")
    return x


def _out(x: np.ndarray, coeffs: np.ndarray):
    return QTensor(coeffs) if x.ndim == 1 else coeffs


def _radial_unit(x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    safe = np.where(r > 0.0, r, 1.0)
    return r, x / safe[..., None]


def _check_radius(x: np.ndarray, R: float) -> np.ndarray:
    r = np.linalg.norm(x, axis=-1)
    if np.any(r > R * (1.0 + 1e-12)):
        raise DomainError(f"point outside the ball of radius {R:g} (|x|={np.max(r):.6g})")
    return r


# ----------------------------------------------------------------------
# Field closures
# ----------------------------------------------------------------------
def harmonic_map_field(x):
    """sqrt(3/2)(x^ x x^ - I/3); singular at the origin."""
    x = _points(x)
    r, unit = _radial_unit(x)
    if np.any(r == 0.0):
        raise SingularPointError("harmonic map is undefined at the origin")
    return _out(x, uniaxial_coeffs(np.ones_like(r), unit))


def boundary_tensor(x):
    """Radial anchoring datum Q_b, extended by 0 at the origin."""
    x = _points(x)
    r, unit = _radial_unit(x)
    return _out(x, uniaxial_coeffs((r > 0.0).astype(float), unit))


def hedgehog_field(p: RadialProfile, x):
    x = _points(x)
    r = _check_radius(x, p.R)
    h, _ = interpolate_h(p, r)
    _, unit = _radial_unit(x)
    return _out(x, uniaxial_coeffs(np.where(r > 0.0, h, 0.0), unit))


def biaxial_perturbation_field(
    p: RadialProfile, x, sigma: float = PERTURBATION_SIGMA, amplitude: float = 1.0
):
    """Hedgehog plus amplitude (r^2 + 12)^-2 (1 - r/sigma)(z x z - I/3)."""
    x = _points(x)
    r = _check_radius(x, p.R)
    base = np.asarray(hedgehog_field(p, x))
    weight = amplitude * (1.0 - r / sigma) / (r * r + 12.0) ** 2
    return _out(x, base + weight[..., None] * Z_PROJECTOR)


def hedgehog_closure(p: RadialProfile) -> Closure:
    return partial(hedgehog_field, p)


def perturbation_closure(
    p: RadialProfile, sigma: float = PERTURBATION_SIGMA, amplitude: float = 1.0
) -> Closure:
    return partial(biaxial_perturbation_field, p, sigma=sigma, amplitude=amplitude)


# ----------------------------------------------------------------------
# Lattice fields
# ----------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class BallField:
    """
    Coefficients on the lattice [-R, R]^3 with n nodes per axis.

    mask: 0 interior (|x| < R - dx/2), 1 boundary (non-interior 6-neighbour
    of an interior node), 2 exterior. Non-interior nodes hold Q_b.
    """

    values: np.ndarray
    mask: np.ndarray
    R: float
    t: float
    provenance: str = "unknown"

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def dx(self) -> float:
        return 2.0 * self.R / (self.n - 1)

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.R, self.R, self.n)

    @cached_property
    def points(self) -> np.ndarray:
        return lattice_points(self.R, self.n)

    @property
    def interior(self) -> np.ndarray:
        return self.mask == INTERIOR

    def with_values(self, values: np.ndarray, provenance: str = None) -> "BallField":
        return BallField(
            values=values,
            mask=self.mask,
            R=self.R,
            t=self.t,
            provenance=provenance or self.provenance,
        )

    def coarsen(self) -> "BallField":
        """Keep every second node; requires odd n so the cube corners survive."""
        if self.n % 2 == 0:
            raise ConfigurationError(f"cannot coarsen a lattice with even n={self.n}")
        n = (self.n + 1) // 2
        values = self.values[::2, ::2, ::2].copy()
        mask = lattice_mask(self.R, n)
        outside = mask != INTERIOR
        values[outside] = np.asarray(boundary_tensor(lattice_points(self.R, n)[outside]))
        return BallField(values=values, mask=mask, R=self.R, t=self.t, provenance=self.provenance)

    @cached_property
    def interpolator(self) -> RegularGridInterpolator:
        ax = self.axis
        return RegularGridInterpolator((ax, ax, ax), self.values, method="linear")

    def as_closure(self) -> Closure:
        """Trilinear interpolant of the lattice values."""

        def closure(x):
            x = _points(x)
            flat = x.reshape(-1, 3)
            _check_radius(flat, self.R * np.sqrt(3.0))
            coeffs = self.interpolator(flat).reshape(x.shape[:-1] + (5,))
            return _out(x, coeffs)

        return closure


def lattice_points(R: float, n: int) -> np.ndarray:
    ax = np.linspace(-R, R, n)
    return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1)


def lattice_mask(R: float, n: int) -> np.ndarray:
    dx = 2.0 * R / (n - 1)
    r = np.linalg.norm(lattice_points(R, n), axis=-1)
    interior = r < R - 0.5 * dx
    mask = np.full((n, n, n), EXTERIOR, dtype=np.int8)
    mask[binary_dilation(interior)] = BOUNDARY
    mask[interior] = INTERIOR
    return mask


def sample_ball_field(closure: Closure, R: float, t: float, n: int, provenance: str = "custom") -> BallField:
    """
    Evaluate `closure` at interior lattice nodes and Q_b elsewhere.

    Parameters
    ----------
    closure : callable
        Vectorised field closure, (..., 3) -> (..., 5).
    R, t : float
        Ball radius and reduced temperature.
    n : int
        Nodes per axis.
    provenance : str
        Tag stored with the field ("harmonic_map" enables the singular-core
        correction in the energy).
    """
    if n < 3:
        raise ConfigurationError(f"lattice needs at least 3 nodes per axis, got n={n}")
    pts = lattice_points(R, n)
    mask = lattice_mask(R, n)
    interior = mask == INTERIOR
    values = np.asarray(boundary_tensor(pts)).copy()
    inside = pts[interior]
    if provenance == "harmonic_map":
        # origin node holds the regularised value 0
        r = np.linalg.norm(inside, axis=-1)
        coeffs = np.zeros(inside.shape[:-1] + (5,))
        coeffs[r > 0.0] = np.asarray(closure(inside[r > 0.0]))
        values[interior] = coeffs
    else:
        values[interior] = np.asarray(closure(inside))
    logger.debug(
        f"[fields] Sampled '{provenance}' on {n}^3 lattice (R={R:g}, {int(interior.sum())} interior nodes)"
    )
    return BallField(values=values, mask=mask, R=R, t=t, provenance=provenance)


def rotate_field_quarter(F: BallField, axis: str = "z") -> BallField:
    """
    Field x -> T F(T^T x) T^T for the 90 degree turn T about a coordinate axis.

    The lattice maps onto itself, so the result is a pure index permutation
    followed by a rotation of every tensor.
    """
    if axis not in QUARTER_TURNS:
        raise DomainError(f"axis must be one of x, y, z, got {axis!r}")
    if axis == "z":
        perm = lambda a: np.swapaxes(a, 0, 1)[::-1]
    elif axis == "x":
        perm = lambda a: np.swapaxes(a, 1, 2)[:, ::-1]
    else:
        perm = lambda a: np.swapaxes(a, 0, 2)[:, :, ::-1]
    values = rotate(perm(F.values), QUARTER_TURNS[axis])
    return BallField(
        values=np.ascontiguousarray(values),
        mask=np.ascontiguousarray(perm(F.mask)),
        R=F.R,
        t=F.t,
        provenance=F.provenance,
    )


def field_frame(F: BallField) -> pd.DataFrame:
    pts = F.points.reshape(-1, 3)
    coeffs = F.values.reshape(-1, 5)
    frame = pd.DataFrame({"x": pts[:, 0], "y": pts[:, 1], "z": pts[:, 2]})
    for k in range(5):
        frame[f"c{k + 1}"] = coeffs[:, k]
    frame["mask"] = F.mask.reshape(-1).astype(int)
    return frame


def core_biaxiality(F: BallField, radius: float) -> float:
    """Largest biaxiality parameter over interior nodes with |x| < radius."""
    sel = (F.mask == INTERIOR) & (np.linalg.norm(F.points, axis=-1) < radius)
    if not sel.any():
        return 0.0
    return float(np.max(biaxiality(F.values[sel])))


def field_metadata(F: BallField) -> Dict[str, object]:
    return {"R": F.R, "t": F.t, "dx": F.dx, "n": F.n, "provenance": F.provenance}


# ----------------------------------------------------------------------
# Division trick S = Q / h
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class FluxDiagnostic:
    delta: float
    flux: float


def divide_by_profile(Q: Union[BallField, Closure], p: RadialProfile, x):
    """
    S(x) = Q(x) / h(|x|).

    Raises NearSingularError inside r_min = 1e-4 R or where h < 1e-14.
    """
    closure = Q.as_closure() if isinstance(Q, BallField) else Q
    x = _points(x)
    r = np.linalg.norm(x, axis=-1)
    r_min = R_MIN_FRACTION * p.R
    if np.any(r < r_min):
        raise NearSingularError(f"S evaluated inside r_min={r_min:.3e} (|x|={np.min(r):.3e})")
    h, _ = interpolate_h(p, r)
    h = np.asarray(h)
    if np.any(h < 1e-14):
        raise NearSingularError(f"profile vanishes at |x|={np.min(r):.3e}")
    return _out(x, np.asarray(closure(x)) / h[..., None])


def s_closure(Q: Union[BallField, Closure], p: RadialProfile) -> Closure:
    return partial(divide_by_profile, Q, p)


def fd_gradient(closure: Closure, x: np.ndarray, step) -> np.ndarray:
    """
    Fourth-order five-point gradient of a closure.

    `step` is a scalar or one step per point. Returns (..., 3, k) where
    axis -2 is the derivative direction and k the closure's output width.
    """
    x = np.asarray(x, dtype=float)
    h = np.asarray(step, dtype=float)[..., None]
    grads = []
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        f = lambda shift: np.asarray(closure(x + shift * h * e))
        grads.append((f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h))
    return np.stack(grads, axis=-2)


def flux_phi(
    S: Closure, p: RadialProfile, delta: float, order: int = QUADRATURE_ORDER
) -> FluxDiagnostic:
    """
    Flux of the conserved vector Phi through the sphere |x| = delta.

    Integrand: 1/2|grad S|^2 - |d_r S|^2 + (1 + 3h_+/t) h^2 (1 - |S|^2)^2 / 4
    + 3 (1 - |S|^2) / delta^2. Equals 12 pi for the hedgehog at every delta.
    """
    r_min = R_MIN_FRACTION * p.R
    if not r_min < delta or delta * (1.0 + 2.0 * FD_STEP) > p.R:
        raise DomainError(f"flux radius {delta:g} outside ({r_min:.3e}, {p.R:g})")
    h, _ = interpolate_h(p, delta)
    step = FD_STEP * delta

    def integrand(x: np.ndarray) -> np.ndarray:
        s = np.asarray(S(x))
        grad = fd_gradient(S, x, step)
        unit = x / np.linalg.norm(x, axis=-1, keepdims=True)
        d_r = np.einsum("...k,...kc->...c", unit, grad)
        defect = 1.0 - norm_sq(s)
        return (
            0.5 * np.sum(grad * grad, axis=(-2, -1))
            - np.sum(d_r * d_r, axis=-1)
            + (1.0 + p.kappa) * h * h * defect**2 / 4.0
            + 3.0 * defect / delta**2
        )

    flux = integrate_sphere(integrand, radius=delta, order=order)
    logger.debug(f"[fields] Flux through |x|={delta:g}: {flux:.12f}")
    return FluxDiagnostic(delta=float(delta), flux=flux)
