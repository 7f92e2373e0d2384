# tools/material.py

"""
Material constants and the Landau-de Gennes bulk potential.

Dimensional constants (a^2, b^2, c^2, L, R0) are reduced to the reduced
temperature t = 27 a^2 c^2 / b^4 and the droplet radius in units of the
biaxial correlation length. The reduced bulk density is shifted by C_t so that
it vanishes on unit-norm uniaxial tensors.
"""

from typing import Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from tools.errors import DomainError, ParameterError
from tools.tensor_core import from_matrix, norm_sq, to_matrix, tr_Q3

SQRT6 = np.sqrt(6.0)

# numeric envelopes for sigma_1/sqrt(t) <= h_+/t <= sigma_2/sqrt(t), t >= 9
SIGMA_LOWER = 0.5
SIGMA_UPPER = 1.0
SIGMA_MIN_T = 9.0


class MaterialParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    a2: float = Field(gt=0)
    b2: float = Field(gt=0)
    c2: float = Field(gt=0)
    L: float = Field(default=1.0, gt=0)
    R0: float = Field(default=1.0, gt=0)

    @classmethod
    def build(cls, **values) -> "MaterialParams":
        """Validated constructor raising ParameterError instead of ValidationError."""
        try:
            return cls(**values)
        except ValidationError as exc:
            raise ParameterError(f"invalid material parameters: {_first_error(exc)}") from exc


class ReducedParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0)
    h_plus: float = Field(gt=0)
    C_t: float
    R_t: float = Field(gt=0)
    s_plus: Optional[float] = Field(default=None, gt=0)
    xi_b: Optional[float] = Field(default=None, gt=0)

    @classmethod
    def from_temperature(cls, t: float, R: float) -> "ReducedParams":
        """Reduced block given directly; s_plus and xi_b stay undefined."""
        if not t > 0:
            raise ParameterError(f"reduced temperature must be positive, got t={t}")
        h_plus = h_plus_of(t)
        try:
            return cls(t=t, h_plus=h_plus, C_t=bulk_shift(t, h_plus), R_t=R)
        except ValidationError as exc:
            raise ParameterError(f"invalid reduced parameters: {_first_error(exc)}") from exc


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    loc = ".".join(str(part) for part in err.get("loc", ()))
    return f"{loc}: {err.get('msg', '')}"


def h_plus_of(t: float) -> float:
    return (3.0 + np.sqrt(9.0 + 8.0 * t)) / 4.0


def bulk_shift(t: float, h_plus: float) -> float:
    return 0.5 + h_plus / t - h_plus**2 / (2.0 * t)


# ----------------------------------------------------------------------
# Reduction
# ----------------------------------------------------------------------
def reduce(p: MaterialParams) -> ReducedParams:
    """
    Nondimensionalise a material block.

    Parameters
    ----------
    p : MaterialParams

    Returns
    -------
    ReducedParams with t, h_plus, s_plus, xi_b, C_t and R_t = R0 / xi_b.
    """
    t = 27.0 * p.a2 * p.c2 / p.b2**2
    h_plus = h_plus_of(t)
    s_plus = (p.b2 + np.sqrt(p.b2**2 + 24.0 * p.a2 * p.c2)) / (4.0 * p.c2)
    xi_b = np.sqrt(27.0 * p.c2 * p.L / (t * p.b2**2))
    try:
        rp = ReducedParams(
            t=t,
            h_plus=h_plus,
            s_plus=s_plus,
            xi_b=xi_b,
            C_t=bulk_shift(t, h_plus),
            R_t=p.R0 / xi_b,
        )
    except ValidationError as exc:
        raise ParameterError(f"invalid reduced parameters: {_first_error(exc)}") from exc
    logger.debug(f"[material] Reduced t={t:.6g}, h+={h_plus:.6g}, R_t={rp.R_t:.6g}")
    return rp


def h_plus_envelope_holds(t: float) -> bool:
    """Check 0.5/sqrt(t) <= h_+/t <= 1/sqrt(t); asserted only for t >= 9."""
    ratio = h_plus_of(t) / t * np.sqrt(t)
    return bool(SIGMA_LOWER - 1e-12 <= ratio <= SIGMA_UPPER + 1e-12)


def reduction_factor(p: MaterialParams, rp: ReducedParams) -> float:
    """lambda = sqrt(27 c^4 / (2 b^4)) / h_+, the tensor scale of the reduced units."""
    return float(np.sqrt(27.0 * p.c2**2 / (2.0 * p.b2**2)) / rp.h_plus)


def rescale_to_reduced(q, p: MaterialParams, rp: ReducedParams):
    """Map a dimensional tensor to reduced units; s_+ (n x n - I/3) goes to norm 1."""
    return reduction_factor(p, rp) * np.asarray(q, dtype=float)


# ----------------------------------------------------------------------
# Bulk potentials
# ----------------------------------------------------------------------
def bulk_f_dimensional(q, p: MaterialParams):
    """-(a^2/2) tr Q^2 - (b^2/3) tr Q^3 + (c^2/4) (tr Q^2)^2."""
    q2 = np.asarray(norm_sq(q))
    q3 = np.asarray(tr_Q3(q))
    value = -0.5 * p.a2 * q2 - p.b2 / 3.0 * q3 + 0.25 * p.c2 * q2**2
    return float(value) if value.ndim == 0 else value


def bulk_f_reduced(q, rp: ReducedParams):
    """Reduced bulk density including the shift C_t; nonnegative on S0."""
    q2 = np.asarray(norm_sq(q))
    q3 = np.asarray(tr_Q3(q))
    value = (
        -0.5 * q2
        - SQRT6 * rp.h_plus / rp.t * q3
        + rp.h_plus**2 / (2.0 * rp.t) * q2**2
        + rp.C_t
    )
    return float(value) if value.ndim == 0 else value


def bulk_f_uniaxial(h, rp: ReducedParams):
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise DomainError(f"uniaxial amplitude must be nonnegative, min h={h.min():.3e}")
    value = -0.5 * h**2 - rp.h_plus / rp.t * h**3 + rp.h_plus**2 / (2.0 * rp.t) * h**4 + rp.C_t
    return float(value) if value.ndim == 0 else value


def bulk_lower_envelope(h):
    h = np.asarray(h, dtype=float)
    value = 0.25 * (1.0 - h**2) ** 2
    return float(value) if value.ndim == 0 else value


def el_rhs_dimensional(q, p: MaterialParams):
    """-a^2 Q - b^2 (Q^2 - |Q|^2 I/3) + c^2 |Q|^2 Q, in coefficients."""
    c = np.asarray(q, dtype=float)
    m = to_matrix(c)
    squared = from_matrix(m @ m, check=False)
    q2 = np.asarray(norm_sq(c))[..., None]
    return -p.a2 * c - p.b2 * np.asarray(squared) + p.c2 * q2 * c
