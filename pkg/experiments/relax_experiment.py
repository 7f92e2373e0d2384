# experiments/relax_experiment.py

from pathlib import Path

from config import EXIT_OK
from memory.run_history import RunHistory
from tools.fields import core_biaxiality, field_frame, field_metadata
from tools.hedgehog_ode import solve_profile
from tools.io_writers import write_field
from tools.relax3d import relax

from .base_experiment import BaseExperiment

CORE_RADIUS = 5.0


class RelaxExperiment(BaseExperiment):
    """
    Gradient-flow relaxation of the configured initial field on the lattice.

    Writes relax.json, history.csv (energy/update trace), field.csv/.json
    (final field) and checkpoints/step_XXXXXXX.csv/.json.
    """

    command = "relax"

    def __init__(self, config, out_dir, logger=None, console=None, history: RunHistory = None):
        super().__init__(name="RelaxExperiment", config=config, out_dir=out_dir, logger=logger, console=console)
        self.history = history or RunHistory()

    def run(self) -> int:
        cfg = self.config
        rp = cfg.reduced()
        relax_cfg = cfg.relax_config(rp)
        profile = solve_profile(rp.t, rp.R_t, cfg.N)

        resume = Path(cfg.resume) if cfg.resume else None
        if resume is not None:
            self.log(f"Resuming from {resume}")
        result = relax(relax_cfg, rp, profile, self.history, self.out_dir / "checkpoints", resume)

        run_id = f"relax-{relax_cfg.init}"
        biax = core_biaxiality(result.field, CORE_RADIUS)
        self.write_json(
            "relax.json",
            {
                "init": relax_cfg.init,
                "steps": result.steps,
                "converged": result.converged,
                "final_update": result.final_update,
                "final_residual": result.final_residual,
                "initial_energy": result.initial_energy,
                "energy": result.energy.to_dict(),
                "max_norm": result.max_norm,
                "norm_bounded": result.norm_bounded,
                "max_biaxiality_core": biax,
                "dx": relax_cfg.dx,
            },
        )
        self.write_csv("history.csv", self.history.frame(run_id))
        write_field(self.out_dir / "field.csv", field_frame(result.field), field_metadata(result.field))

        if not result.norm_bounded:
            self.log("max |Q| exceeded its initial ceiling during relaxation", level="warning")
        if not result.converged:
            self.log(f"Stopped at max_steps={relax_cfg.max_steps} before reaching tol", level="warning")
        self.summary(
            f"Relaxation '{relax_cfg.init}' n={relax_cfg.grid_n}",
            [
                ("steps", result.steps),
                ("converged", result.converged),
                ("initial energy", result.initial_energy),
                ("final energy", result.energy.total),
                ("err_est", result.energy.quadrature_error_estimate),
                ("residual", result.final_residual),
                ("max |Q|", result.max_norm),
                ("|Q| within bound", result.norm_bounded),
                (f"max beta, |x| < {CORE_RADIUS:g}", biax),
            ],
        )
        return EXIT_OK
