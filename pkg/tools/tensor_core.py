# tools/tensor_core.py

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from loguru import logger
from scipy.spatial.transform import Rotation

from config import EIGEN_DISCRIMINANT_TOL, UNIT_TOL
from tools.errors import PreconditionError


SQRT2 = np.sqrt(2.0)
SQRT6 = np.sqrt(6.0)
SQRT_3_2 = np.sqrt(1.5)

# Orthonormal basis E1..E5 of symmetric traceless 3x3 matrices (Q:P = Q_ij P_ij)
BASIS = np.zeros((5, 3, 3))
BASIS[0] = np.diag([1.0, -1.0, 0.0]) / SQRT2
BASIS[1] = np.diag([-1.0, -1.0, 2.0]) / SQRT6
BASIS[2, 0, 1] = BASIS[2, 1, 0] = 1.0 / SQRT2
BASIS[3, 0, 2] = BASIS[3, 2, 0] = 1.0 / SQRT2
BASIS[4, 1, 2] = BASIS[4, 2, 1] = 1.0 / SQRT2
BASIS.setflags(write=False)

Z_AXIS = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class QTensor:
    """
    Symmetric traceless 3x3 tensor stored as 5 coefficients in BASIS.

    Behaves like its coefficient vector under ``np.asarray`` so every
    function in this module accepts either a QTensor or a raw ``(..., 5)``
    coefficient array.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(5)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls) -> "QTensor":
        return cls(np.zeros(5))

    @property
    def matrix(self) -> np.ndarray:
        return to_matrix(self.coeffs)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.coeffs, self.coeffs)))

    def __array__(self, dtype=None, copy=None):
        return np.array(self.coeffs, dtype=dtype)

    def __add__(self, other):
        return QTensor(self.coeffs + np.asarray(other, dtype=float))

    def __sub__(self, other):
        return QTensor(self.coeffs - np.asarray(other, dtype=float))

    def __mul__(self, scalar: float):
        return QTensor(self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return QTensor(-self.coeffs)

    def __repr__(self):
        return f"QTensor({np.array2string(self.coeffs, precision=6)})"


@dataclass(frozen=True, eq=False)
class EigenFrame:
    """Eigenvalues sorted descending; eigenvectors stored as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


QLike = Union[QTensor, np.ndarray]


def _coeffs(q) -> np.ndarray:
    return np.asarray(q, dtype=float)


def _like(template, coeffs: np.ndarray):
    """Return a QTensor when the caller passed one, else the raw array."""
    if isinstance(template, QTensor):
        return QTensor(coeffs)
    return coeffs


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value


# ----------------------------------------------------------------------
# Construction / conversion
# ----------------------------------------------------------------------
def to_matrix(q) -> np.ndarray:
    """Reconstruct the (..., 3, 3) matrix of coefficient array(s)."""
    return np.einsum("...k,kij->...ij", _coeffs(q), BASIS)


def from_matrix(m, check: bool = True):
    """
    Project matrices onto the basis.

    Parameters
    ----------
    m : array_like, shape (..., 3, 3)
    check : bool
        Raise PreconditionError when m is not symmetric and traceless
        within UNIT_TOL * max(1, |m|).

    Returns
    -------
    QTensor for a single matrix, otherwise a (..., 5) array.
    """
    m = np.asarray(m, dtype=float)
    if check:
        scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
        asym = np.max(np.abs(m - np.swapaxes(m, -1, -2))) if m.size else 0.0
        trace = np.max(np.abs(np.trace(m, axis1=-2, axis2=-1))) if m.size else 0.0
        if asym > UNIT_TOL * scale or trace > UNIT_TOL * scale:
            raise PreconditionError(
                f"matrix is not symmetric traceless (asym={asym:.3e}, trace={trace:.3e})"
            )
    c = np.einsum("...ij,kij->...k", m, BASIS)
    if m.ndim == 2:
        return QTensor(c)
    return c


def uniaxial_coeffs(s, n) -> np.ndarray:
    """Vectorised sqrt(3/2) s (n x n - I/3) without the unit-norm check."""
    s = np.asarray(s, dtype=float)
    n = np.asarray(n, dtype=float)
    nx, ny, nz = n[..., 0], n[..., 1], n[..., 2]
    base = np.stack(
        [
            (nx * nx - ny * ny) / SQRT2,
            (2.0 * nz * nz - nx * nx - ny * ny) / SQRT6,
            SQRT2 * nx * ny,
            SQRT2 * nx * nz,
            SQRT2 * ny * nz,
        ],
        axis=-1,
    )
    return SQRT_3_2 * s[..., None] * base


def from_uniaxial(s: float, n) -> QTensor:
    """
    Uniaxial tensor sqrt(3/2) s (n x n - I/3); its norm is |s|.

    Raises PreconditionError for a non-unit director.
    """
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(float(np.linalg.norm(n)) - 1.0) > UNIT_TOL:
        raise PreconditionError(f"director must be a unit vector, |n|={np.linalg.norm(n):.15f}")
    return QTensor(uniaxial_coeffs(float(s), n))


def random_qtensor(rng: np.random.Generator, size=None, scale: float = 1.0) -> np.ndarray:
    shape = (5,) if size is None else tuple(np.atleast_1d(size)) + (5,)
    return scale * rng.standard_normal(shape)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    # normalised 4-D gaussian quaternion = Haar-uniform rotation
    return Rotation.from_quat(rng.standard_normal(4)).as_matrix()


def rotate(q, rotation: np.ndarray):
    """T Q T^T for an orthogonal 3x3 matrix T."""
    t = np.asarray(rotation, dtype=float)
    m = to_matrix(q)
    rotated = np.einsum("ia,...ab,jb->...ij", t, m, t)
    return _like(q, np.einsum("...ij,kij->...k", rotated, BASIS))


# ----------------------------------------------------------------------
# Invariants
# ----------------------------------------------------------------------
def norm_sq(q):
    c = _coeffs(q)
    return _scalar(np.einsum("...k,...k->...", c, c))


def tr_Q2(q):
    m = to_matrix(q)
    return _scalar(np.einsum("...ij,...ji->...", m, m))


def tr_Q3(q):
    m = to_matrix(q)
    return _scalar(np.einsum("...ij,...jk,...ki->...", m, m, m))


def biaxiality(q):
    """
    Biaxiality parameter beta = 1 - 6 (tr Q^3)^2 / |Q|^6 in [0, 1].

    beta = 0 for uniaxial tensors and, by convention, for Q = 0.
    """
    nsq = np.asarray(norm_sq(q), dtype=float)
    t3 = np.asarray(tr_Q3(q), dtype=float)
    safe = np.where(nsq > 1e-30, nsq, 1.0)
    beta = np.where(nsq > 1e-30, 1.0 - 6.0 * t3 * t3 / safe**3, 0.0)
    return _scalar(np.clip(beta, 0.0, 1.0))


# ----------------------------------------------------------------------
# Eigen-decomposition
# ----------------------------------------------------------------------
def _null_vector(m: np.ndarray, lam: float) -> np.ndarray:
    a = m - lam * np.eye(3)
    candidates = [np.cross(a[0], a[1]), np.cross(a[0], a[2]), np.cross(a[1], a[2])]
    norms = [np.linalg.norm(c) for c in candidates]
    best = int(np.argmax(norms))
    return candidates[best] / norms[best]


def _eigen_lapack(m: np.ndarray) -> EigenFrame:
    w, v = np.linalg.eigh(m)
    order = np.argsort(w)[::-1]
    return EigenFrame(eigenvalues=w[order], eigenvectors=v[:, order])


def eigen(q) -> EigenFrame:
    """
    Eigen-decomposition of a single symmetric traceless tensor.

    Closed form: the characteristic cubic lambda^3 - (|Q|^2/2) lambda - det Q
    is solved with trigonometric roots. The eigenvector of the most isolated
    root comes from a cross product of rows of (Q - lambda I); the remaining
    pair diagonalises the 2x2 restriction to the orthogonal complement.
    Near-degenerate spectra (small discriminant) are handed to LAPACK.
    """
    m = to_matrix(_coeffs(q).reshape(5))
    nsq = float(norm_sq(q))
    if nsq == 0.0:
        return EigenFrame(eigenvalues=np.zeros(3), eigenvectors=np.eye(3))

    t3 = float(tr_Q3(q))
    # discriminant of the traceless cubic = |Q|^6 * beta / 2
    discriminant = 0.5 * nsq**3 - 3.0 * t3 * t3
    if discriminant < EIGEN_DISCRIMINANT_TOL * max(1.0, nsq**3):
        logger.debug(f"[tensor_core] Ill-conditioned cubic (disc={discriminant:.3e}); using eigh.")
        return _eigen_lapack(m)

    rho = np.sqrt(nsq / 6.0)
    arg = np.clip((t3 / 3.0) / (2.0 * rho**3), -1.0, 1.0)
    phi = np.arccos(arg) / 3.0
    lam1 = 2.0 * rho * np.cos(phi)
    lam3 = 2.0 * rho * np.cos(phi + 2.0 * np.pi / 3.0)
    lam2 = -lam1 - lam3

    isolated_top = (lam1 - lam2) >= (lam2 - lam3)
    v_iso = _null_vector(m, lam1 if isolated_top else lam3)

    axis = np.eye(3)[int(np.argmin(np.abs(v_iso)))]
    u = np.cross(v_iso, axis)
    u /= np.linalg.norm(u)
    w = np.cross(v_iso, u)
    a, b, c = u @ m @ u, u @ m @ w, w @ m @ w
    theta = 0.5 * np.arctan2(2.0 * b, a - c)
    big = np.cos(theta) * u + np.sin(theta) * w
    small = -np.sin(theta) * u + np.cos(theta) * w

    vectors = np.column_stack([v_iso, big, small] if isolated_top else [big, small, v_iso])
    values = np.einsum("ik,ij,jk->k", vectors, m, vectors)
    order = np.argsort(values)[::-1]
    return EigenFrame(eigenvalues=values[order], eigenvectors=vectors[:, order])


def director(q) -> Optional[np.ndarray]:
    """Eigenvector of the leading eigenvalue (None for the zero tensor)."""
    if norm_sq(q) == 0.0:
        return None
    return eigen(q).eigenvectors[:, 0]
