# tools/run_config.py

"""
Run configuration: plain `key = value` files plus `--set key=value`
overrides, validated by the pydantic model RunConfig.
"""

from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config import (
    CHECKPOINT_EVERY,
    DT_FACTOR,
    PERTURBATION_SIGMA,
    PROFILE_NODES,
    QUADRATURE_ORDER,
    RANDOM_SEED,
    RELAX_MAX_STEPS,
    RELAX_TOL,
)
from tools.errors import UsageError
from tools.material import MaterialParams, ReducedParams, reduce
from tools.relax3d import RelaxConfig

MATERIAL_KEYS = ("a2", "b2", "c2", "L", "R0")
REDUCED_KEYS = ("t", "R")


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    # material block
    a2: Optional[float] = None
    b2: Optional[float] = None
    c2: Optional[float] = None
    L: Optional[float] = None
    R0: Optional[float] = None
    # reduced block
    t: Optional[float] = None
    R: Optional[float] = None

    N: int = Field(default=PROFILE_NODES, ge=1)
    grid_n: int = Field(default=65, ge=1)
    dt_factor: float = DT_FACTOR
    max_steps: int = RELAX_MAX_STEPS
    tol: float = RELAX_TOL
    seed: int = RANDOM_SEED
    out_dir: str = "results"
    order: int = QUADRATURE_ORDER
    threads: int = Field(default=1, ge=1)
    init: Literal["hedgehog", "perturbed_hedgehog", "frozen_boundary_extension"] = "hedgehog"
    harmonic: bool = False
    checkpoint_every: int = CHECKPOINT_EVERY
    resume: Optional[str] = None
    n_seeds: int = Field(default=100, ge=1)
    sigma: float = PERTURBATION_SIGMA
    radii: int = Field(default=50, ge=2)

    @model_validator(mode="after")
    def _one_block(self) -> "RunConfig":
        material = [getattr(self, key) is not None for key in MATERIAL_KEYS]
        reduced = [getattr(self, key) is not None for key in REDUCED_KEYS]
        if any(material) and not all(material):
            missing = [k for k, present in zip(MATERIAL_KEYS, material) if not present]
            raise ValueError(f"incomplete material block, missing {missing}")
        if any(reduced) and not all(reduced):
            missing = [k for k, present in zip(REDUCED_KEYS, reduced) if not present]
            raise ValueError(f"incomplete reduced block, missing {missing}")
        if all(material) == all(reduced):
            raise ValueError("exactly one of the material block (a2, b2, c2, L, R0) or the reduced block (t, R) is required")
        return self

    @property
    def is_material(self) -> bool:
        return self.a2 is not None

    def material(self) -> MaterialParams:
        return MaterialParams.build(**{key: getattr(self, key) for key in MATERIAL_KEYS})

    def reduced(self) -> ReducedParams:
        if self.is_material:
            return reduce(self.material())
        return ReducedParams.from_temperature(self.t, self.R)

    def relax_config(self, rp: ReducedParams, init: Optional[str] = None) -> RelaxConfig:
        return RelaxConfig.build(
            t=rp.t,
            R=rp.R_t,
            grid_n=self.grid_n,
            dt_factor=self.dt_factor,
            max_steps=self.max_steps,
            tol=self.tol,
            init=init or self.init,
            sigma=self.sigma,
            checkpoint_every=self.checkpoint_every,
            threads=self.threads,
        )

    def resolved(self) -> Dict[str, Any]:
        """Configuration as embedded in every output file."""
        return self.model_dump(exclude_none=True)


def parse_config_text(text: str, source: str = "<text>") -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise UsageError(f"{source}:{lineno}: empty key")
        values[key] = value
    return values


def parse_overrides(pairs: Sequence[str]) -> Dict[str, str]:
    return parse_config_text("\n".join(pairs), source="--set")


def load_run_config(path: Optional[Path] = None, overrides: Optional[List[str]] = None) -> RunConfig:
    """
    Merge a config file and overrides (overrides win) into a RunConfig.

    Raises
    ------
    UsageError
        For unreadable files, malformed lines, unknown keys, partial or
        conflicting blocks and non-numeric values.
    """
    values: Dict[str, str] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        values.update(parse_config_text(path.read_text(encoding="utf-8"), source=str(path)))
    values.update(parse_overrides(overrides or []))
    try:
        cfg = RunConfig(**values)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = ".".join(str(part) for part in err.get("loc", ())) or "config"
        raise UsageError(f"invalid configuration ({loc}): {err.get('msg', '')}") from exc
    logger.debug(f"[run_config] Resolved configuration: {cfg.resolved()}")
    return cfg
