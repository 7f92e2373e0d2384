# tools/sphere_quadrature.py

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from loguru import logger

from config import QUADRATURE_MIN_ORDER, QUADRATURE_ORDER
from tools.errors import ConfigurationError


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes on the unit sphere with weights summing to 4*pi."""

    points: np.ndarray
    weights: np.ndarray
    order: int


@lru_cache(maxsize=16)
def sphere_rule(order: int = QUADRATURE_ORDER) -> SphereRule:
    """
    Product rule: Gauss-Legendre in cos(theta) times trapezoid in phi.

    Parameters
    ----------
    order : int
        Number m of Gauss nodes; the rule has m x 2m points and integrates
        spherical polynomials of degree <= 2m - 1 exactly.
    """
    if order < QUADRATURE_MIN_ORDER:
        raise ConfigurationError(
            f"sphere quadrature order {order} below minimum {QUADRATURE_MIN_ORDER}"
        )
    mu, w_mu = np.polynomial.legendre.leggauss(order)
    n_phi = 2 * order
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(1.0 - mu**2)

    points = np.stack(
        [
            np.outer(sin_theta, np.cos(phi)),
            np.outer(sin_theta, np.sin(phi)),
            np.outer(mu, np.ones(n_phi)),
        ],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.outer(w_mu, np.full(n_phi, 2.0 * np.pi / n_phi)).reshape(-1)
    points.setflags(write=False)
    weights.setflags(write=False)
    logger.debug(f"[sphere_quadrature] Built rule of order {order} ({points.shape[0]} nodes)")
    return SphereRule(points=points, weights=weights, order=order)


def integrate_sphere(
    integrand: Callable[[np.ndarray], np.ndarray],
    radius: float = 1.0,
    order: int = QUADRATURE_ORDER,
) -> float:
    """
    Surface integral of a vectorised integrand over |x| = radius.

    `integrand` receives the (M, 3) node positions and returns M values.
    """
    rule = sphere_rule(order)
    values = np.asarray(integrand(radius * rule.points), dtype=float)
    return float(radius**2 * np.sum(rule.weights * values))
