# experiments/compare_experiment.py

import numpy as np

from config import EXIT_OK
from memory.run_history import RunHistory
from tools.energy import energy_compare_hedgehog_vs_perturbation
from tools.fields import core_biaxiality
from tools.hedgehog_ode import solve_profile
from tools.relax3d import relax

from .base_experiment import BaseExperiment
from .relax_experiment import CORE_RADIUS


class CompareExperiment(BaseExperiment):
    """
    Hedgehog against its biaxial perturbation, and against the field
    relaxed from that perturbation, all on the same lattice.

    compare.json holds E_H, E_Hb, E_relaxed, delta = E_Hb - E_H, the
    error bar err_est = |delta - delta_coarse| / 3 from the lattice with every
    second node, and the 12 pi R reference.
    """

    command = "compare"

    def __init__(self, config, out_dir, logger=None, console=None, history: RunHistory = None):
        super().__init__(name="CompareExperiment", config=config, out_dir=out_dir, logger=logger, console=console)
        self.history = history or RunHistory()

    def run(self) -> int:
        cfg = self.config
        rp = cfg.reduced()
        profile = solve_profile(rp.t, rp.R_t, cfg.N)

        comparison = energy_compare_hedgehog_vs_perturbation(profile, rp, cfg.grid_n, sigma=cfg.sigma)
        relax_cfg = cfg.relax_config(rp, init="perturbed_hedgehog")
        relaxed = relax(relax_cfg, rp, profile, self.history, checkpoint_dir=None)

        E_H = comparison.hedgehog.total
        E_relaxed = relaxed.energy.total
        if comparison.delta < 0.0 and not comparison.significant:
            self.log(
                f"delta={comparison.delta:.4g} is within the error bar {comparison.error_bar:.2g}",
                level="warning",
            )
        self.write_json(
            "compare.json",
            {
                "E_H": E_H,
                "E_Hb": comparison.perturbed.total,
                "E_relaxed": E_relaxed,
                "delta": comparison.delta,
                "delta_coarse": comparison.delta_coarse,
                "delta_relaxed": E_relaxed - E_H,
                "err_est": comparison.error_bar,
                "err_est_relaxed": relaxed.energy.quadrature_error_estimate,
                "significant": comparison.significant,
                "reference_12piR": 12.0 * np.pi * rp.R_t,
                "relax_steps": relaxed.steps,
                "relax_converged": relaxed.converged,
                "max_biaxiality_core": core_biaxiality(relaxed.field, CORE_RADIUS),
                "R": rp.R_t,
                "t": rp.t,
                "grid_n": cfg.grid_n,
            },
        )

        self.summary(
            f"Hedgehog vs biaxial perturbation, t={rp.t:g}, R={rp.R_t:g}, n={cfg.grid_n}",
            [
                ("E_H", E_H),
                ("E_Hb", comparison.perturbed.total),
                ("E_relaxed", E_relaxed),
                ("delta", comparison.delta),
                ("err_est", comparison.error_bar),
                ("12 pi R", 12.0 * np.pi * rp.R_t),
            ],
        )
        return EXIT_OK
