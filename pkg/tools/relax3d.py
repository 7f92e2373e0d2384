# tools/relax3d.py

"""
Gradient-flow relaxation of the reduced Euler-Lagrange system

    Delta Q = -Q - (3 sqrt(6) h_+/t)(Q^2 - |Q|^2 I/3) + (2 h_+^2/t) |Q|^2 Q

on the ball with radial Dirichlet data. Explicit Euler steps
Q <- Q + dt (Delta_h Q - el_rhs(Q)) on interior nodes; non-interior nodes keep
Q_b. The flow is the L2 gradient flow of the lattice energy in tools.energy,
so every accepted step must lower it.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import (
    BULK_STIFFNESS,
    CHECKPOINT_EVERY,
    DT_FACTOR,
    DT_FACTOR_MAX,
    ENERGY_INCREASE_TOL,
    LOG_EVERY,
    MAX_NORM_SLACK,
    MIN_RELAX_GRID,
    PERTURBATION_SIGMA,
    RELAX_MAX_STEPS,
    RELAX_TOL,
    TRANSIENT_STEPS,
)
from memory.run_history import RunHistory
from tools.energy import EnergyBreakdown, field_energy
from tools.errors import ConfigurationError, DivergenceError, InstabilityError
from tools.fields import (
    INTERIOR,
    BallField,
    boundary_tensor,
    field_frame,
    field_metadata,
    hedgehog_closure,
    hedgehog_field,
    perturbation_closure,
    sample_ball_field,
)
from tools.hedgehog_ode import RadialProfile, radial_stencil
from tools.io_writers import read_field, write_field
from tools.material import ReducedParams
from tools.sphere_quadrature import sphere_rule
from tools.tensor_core import BASIS, norm_sq, to_matrix

SQRT6 = np.sqrt(6.0)

InitKind = Literal["hedgehog", "perturbed_hedgehog", "frozen_boundary_extension"]


class RelaxConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    t: float = Field(gt=0)
    R: float = Field(gt=0)
    grid_n: int = Field(default=65, ge=MIN_RELAX_GRID)
    dt_factor: float = Field(default=DT_FACTOR, gt=0, le=DT_FACTOR_MAX)
    max_steps: int = Field(default=RELAX_MAX_STEPS, ge=0)
    tol: float = Field(default=RELAX_TOL, gt=0)
    init: InitKind = "hedgehog"
    sigma: float = Field(default=PERTURBATION_SIGMA, gt=0)
    checkpoint_every: int = Field(default=CHECKPOINT_EVERY, ge=0)
    threads: int = Field(default=1, ge=1)

    @field_validator("grid_n")
    @classmethod
    def _odd_grid(cls, value: int) -> int:
        if value % 2 == 0:
            raise ValueError("grid_n must be odd so the origin is a lattice node")
        return value

    @classmethod
    def build(cls, **values) -> "RelaxConfig":
        try:
            return cls(**values)
        except ValidationError as exc:
            err = exc.errors()[0]
            loc = ".".join(str(part) for part in err.get("loc", ()))
            raise ConfigurationError(f"invalid relaxation settings: {loc}: {err.get('msg', '')}") from exc

    @property
    def dx(self) -> float:
        return 2.0 * self.R / (self.grid_n - 1)


@dataclass(frozen=True, eq=False)
class RelaxResult:
    field: BallField
    steps: int
    final_update: float
    final_residual: float
    energy: EnergyBreakdown
    initial_energy: float
    converged: bool
    norm_bounded: bool = True

    @property
    def max_norm(self) -> float:
        return float(np.sqrt(np.max(norm_sq(self.field.values))))


# ----------------------------------------------------------------------
# Right-hand sides
# ----------------------------------------------------------------------
def el_rhs(q, rp: ReducedParams) -> np.ndarray:
    """Bulk force of the reduced EL system, vectorised over (..., 5)."""
    c = np.asarray(q, dtype=float)
    m = to_matrix(c)
    # projection onto the traceless basis removes |Q|^2 I/3
    squared = np.einsum("...ij,...jk,lik->...l", m, m, BASIS)
    q2 = np.asarray(norm_sq(c))[..., None]
    return -c - 3.0 * SQRT6 * rp.h_plus / rp.t * squared + 2.0 * rp.h_plus**2 / rp.t * q2 * c


def uniaxial_rhs(q, rp: ReducedParams) -> np.ndarray:
    """(|Q|^2 - 1) Q + (3 h_+/t)(|Q|^2 - |Q|) Q."""
    c = np.asarray(q, dtype=float)
    q2 = np.asarray(norm_sq(c))[..., None]
    kappa = 3.0 * rp.h_plus / rp.t
    return (q2 - 1.0) * c + kappa * (q2 - np.sqrt(q2)) * c


# ----------------------------------------------------------------------
# Discrete operators
# ----------------------------------------------------------------------
def _laplacian_slab(values: np.ndarray, out: np.ndarray, lo: int, hi: int, inv_dx2: float):
    c = values[lo:hi, 1:-1, 1:-1]
    out[lo:hi, 1:-1, 1:-1] = inv_dx2 * (
        values[lo - 1 : hi - 1, 1:-1, 1:-1]
        + values[lo + 1 : hi + 1, 1:-1, 1:-1]
        + values[lo:hi, :-2, 1:-1]
        + values[lo:hi, 2:, 1:-1]
        + values[lo:hi, 1:-1, :-2]
        + values[lo:hi, 1:-1, 2:]
        - 6.0 * c
    )


def discrete_laplacian(F: BallField, executor: Optional[ThreadPoolExecutor] = None, slabs: int = 1) -> np.ndarray:
    """
    7-point Laplacian at interior nodes, zero elsewhere.

    With an executor the first axis is split into `slabs` independent
    blocks written to disjoint slices of the output.
    """
    values = F.values
    out = np.zeros_like(values)
    inv_dx2 = 1.0 / F.dx**2
    n = F.n
    if executor is None or slabs <= 1:
        _laplacian_slab(values, out, 1, n - 1, inv_dx2)
    else:
        bounds = np.linspace(1, n - 1, slabs + 1).astype(int)
        futures = [
            executor.submit(_laplacian_slab, values, out, lo, hi, inv_dx2)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for future in futures:
            future.result()
    out[F.mask != INTERIOR] = 0.0
    return out


def _force(F: BallField, rp: ReducedParams, executor=None, slabs: int = 1) -> np.ndarray:
    force = discrete_laplacian(F, executor, slabs) - el_rhs(F.values, rp)
    force[F.mask != INTERIOR] = 0.0
    return force


def residual_field(F: BallField, rp: ReducedParams, r_max: Optional[float] = None) -> float:
    """sup over interior nodes (optionally |x| < r_max) of |Delta_h Q - el_rhs(Q)|."""
    norms = np.sqrt(np.sum(_force(F, rp) ** 2, axis=-1))
    sel = F.mask == INTERIOR
    if r_max is not None:
        sel &= np.linalg.norm(F.points, axis=-1) < r_max
    return float(np.max(norms[sel])) if sel.any() else 0.0


def reduced_hedgehog_residual(p: RadialProfile, rp: ReducedParams, order: int = 6) -> float:
    """
    Residual of Delta H = uniaxial_rhs(H) for the assembled hedgehog.

    H is evaluated along rays through the sphere-rule directions at the
    profile nodes; the radial part of the Laplacian uses the profile stencil
    and the angular part contributes -6 H / r^2.
    """
    directions = sphere_rule(order).points
    nodes = np.concatenate([[0.0], p.r])
    st = radial_stencil(nodes)
    worst = 0.0
    for unit in directions:
        ray = np.asarray(hedgehog_field(p, p.r[:, None] * unit[None, :]))
        values = np.concatenate([np.zeros((1, 5)), ray])
        lap = (
            st.lower[:, None] * values[:-2]
            + st.diag[:, None] * values[1:-1]
            + st.upper[:, None] * values[2:]
        )
        residual = lap - uniaxial_rhs(values[1:-1], rp)
        worst = max(worst, float(np.max(np.sqrt(np.sum(residual**2, axis=-1)))))
    return worst


# ----------------------------------------------------------------------
# Checkpoints
# ----------------------------------------------------------------------
def checkpoint_path(directory: Path, step: int) -> Path:
    return Path(directory) / f"step_{step:07d}.csv"


def save_checkpoint(
    directory: Path,
    F: BallField,
    step: int,
    energy: float,
    norm_ceiling: Optional[float] = None,
    norm_bounded: bool = True,
) -> Path:
    """Dump F with its step and energy; the max-principle state rides along so resumes check the same bound."""
    meta = field_metadata(F)
    meta.update({"step": step, "energy": energy, "norm_bounded": norm_bounded})
    if norm_ceiling is not None:
        meta["norm_ceiling"] = norm_ceiling
    csv_path, _ = write_field(checkpoint_path(directory, step), field_frame(F), meta)
    return csv_path


def load_checkpoint(path: Path) -> Tuple[BallField, int]:
    field, step, _ = read_checkpoint(path)
    return field, step


def read_checkpoint(path: Path) -> Tuple[BallField, int, Dict[str, Any]]:
    frame, meta = read_field(path)
    n = int(meta["n"])
    values = frame[[f"c{k}" for k in range(1, 6)]].to_numpy(dtype=float).reshape(n, n, n, 5)
    mask = frame["mask"].to_numpy(dtype=np.int8).reshape(n, n, n)
    field = BallField(
        values=values,
        mask=mask,
        R=float(meta["R"]),
        t=float(meta["t"]),
        provenance=str(meta["provenance"]),
    )
    logger.info(f"[relax3d] Loaded checkpoint {path} at step {meta['step']}")
    return field, int(meta["step"]), meta


# ----------------------------------------------------------------------
# Flow
# ----------------------------------------------------------------------
def time_step(cfg: RelaxConfig) -> float:
    """dt = dt_factor dx^2, capped by the explicit-stability limit including the bulk stiffness."""
    dx2 = cfg.dx**2
    dt = cfg.dt_factor * dx2
    ceiling = 1.9 / (12.0 / dx2 + BULK_STIFFNESS)
    if dt > ceiling:
        logger.warning(f"[relax3d] dt={dt:.4g} exceeds stability ceiling {ceiling:.4g}; using the ceiling.")
        dt = ceiling
    return dt


def initial_field(cfg: RelaxConfig, profile: RadialProfile) -> BallField:
    if cfg.init == "hedgehog":
        closure = hedgehog_closure(profile)
    elif cfg.init == "perturbed_hedgehog":
        closure = perturbation_closure(profile, sigma=cfg.sigma)
    else:
        closure = boundary_tensor
    return sample_ball_field(closure, cfg.R, cfg.t, cfg.grid_n, provenance=cfg.init)


def relax_field(
    F: Optional[BallField],
    rp: ReducedParams,
    cfg: RelaxConfig,
    history: Optional[RunHistory] = None,
    checkpoint_dir: Optional[Path] = None,
    resume: Optional[Path] = None,
    run_id: str = "relax",
) -> RelaxResult:
    """
    Relax a BallField by explicit gradient-flow steps.

    Parameters
    ----------
    F : BallField
        Initial field; may be None when `resume` is given.
    rp : ReducedParams
    cfg : RelaxConfig
        Step size, limits and checkpoint cadence.
    history : RunHistory, optional
        Receives (step, energy, update, max_norm) for every step.
    checkpoint_dir : Path, optional
        Directory for step_XXXXXXX.csv/.json dumps every cfg.checkpoint_every steps.
    resume : Path, optional
        Checkpoint CSV to continue from.

    Raises
    ------
    InstabilityError
        When the lattice energy grows by more than ENERGY_INCREASE_TOL in a step.
    DivergenceError
        When non-finite values appear.
    """
    start = 0
    meta: Dict[str, Any] = {}
    if resume is not None:
        F, start, meta = read_checkpoint(resume)
    if F is None:
        raise ConfigurationError("relax_field needs an initial field or a checkpoint to resume from")
    if F.n < MIN_RELAX_GRID:
        raise ConfigurationError(f"relaxation needs at least {MIN_RELAX_GRID} nodes per axis, got {F.n}")

    dt = time_step(cfg)
    interior = F.mask == INTERIOR
    energy = field_energy(F, rp, estimate_error=False).total
    initial_energy = energy
    norm_ceiling = float(
        meta.get("norm_ceiling", max(float(np.sqrt(np.max(norm_sq(F.values)))), 1.0) + MAX_NORM_SLACK)
    )
    norm_bounded = bool(meta.get("norm_bounded", True))
    update = np.inf
    converged = False
    step = start

    executor = ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
    try:
        logger.info(
            f"[relax3d] Relaxing '{F.provenance}' n={F.n}, dt={dt:.4g}, from step {start} (E={energy:.10g})"
        )
        while step < cfg.max_steps:
            step += 1
            force = _force(F, rp, executor, cfg.threads)
            if not np.all(np.isfinite(force)):
                raise DivergenceError("non-finite force in relaxation", step)

            values = F.values + dt * force
            F = F.with_values(values)
            update = dt * float(np.max(np.sqrt(np.sum(force[interior] ** 2, axis=-1))))

            new_energy = field_energy(F, rp, estimate_error=False).total
            if not np.isfinite(new_energy):
                raise DivergenceError("non-finite energy in relaxation", step)
            if new_energy > energy + ENERGY_INCREASE_TOL:
                raise InstabilityError("energy increased during relaxation", step, new_energy - energy)
            energy = new_energy

            max_norm = float(np.sqrt(np.max(norm_sq(values))))
            if step > TRANSIENT_STEPS and max_norm > norm_ceiling:
                norm_bounded = False
                logger.warning(f"[relax3d] Step {step}: max |Q|={max_norm:.6f} exceeds {norm_ceiling:.6f}")
            if history is not None:
                history.store(run_id, step, energy, update, max_norm)
            if step % LOG_EVERY == 0:
                logger.debug(f"[relax3d] step {step}: E={energy:.12g}, update={update:.3e}, max|Q|={max_norm:.6f}")
            if checkpoint_dir is not None and cfg.checkpoint_every and step % cfg.checkpoint_every == 0:
                save_checkpoint(checkpoint_dir, F, step, energy, norm_ceiling, norm_bounded)

            if update < cfg.tol * dt:
                converged = True
                break
    finally:
        if executor is not None:
            executor.shutdown()

    if not converged:
        logger.warning(f"[relax3d] Not converged after {step} steps (update={update:.3e}).")
    result = RelaxResult(
        field=F,
        steps=step,
        final_update=float(update),
        final_residual=residual_field(F, rp),
        energy=field_energy(F, rp),
        initial_energy=initial_energy,
        converged=converged,
        norm_bounded=norm_bounded,
    )
    logger.info(
        f"[relax3d] Finished '{F.provenance}' after {step} steps: E={result.energy.total:.10g}, "
        f"residual={result.final_residual:.3e}, max|Q|={result.max_norm:.6f}"
    )
    return result


def relax(
    cfg: RelaxConfig,
    rp: ReducedParams,
    profile: RadialProfile,
    history: Optional[RunHistory] = None,
    checkpoint_dir: Optional[Path] = None,
    resume: Optional[Path] = None,
) -> RelaxResult:
    """Build the initial field named by cfg.init (unless resuming) and relax it."""
    F = None if resume is not None else initial_field(cfg, profile)
    return relax_field(F, rp, cfg, history, checkpoint_dir, resume, run_id=f"relax-{cfg.init}")
