# experiments/energy_experiment.py

import numpy as np
import pandas as pd

from config import EXIT_OK
from tools.energy import field_energy, harmonic_map_energy, monotonicity_scan, radial_energy
from tools.fields import harmonic_map_field, hedgehog_closure, sample_ball_field
from tools.hedgehog_ode import RadialProfile, solve_profile

from .base_experiment import BaseExperiment


class EnergyExperiment(BaseExperiment):
    """
    Energy of the radial hedgehog (or, with `harmonic = true`, of the
    profile h = 1) from the 1-D quadrature and on the 3-D lattice.

    Writes
    ------
    energy.json        1-D breakdown, lattice breakdown and the 12 pi R reference
    monotonicity.csv   r, E_over_r
    """

    command = "energy"

    def __init__(self, config, out_dir, logger=None, console=None):
        super().__init__(name="EnergyExperiment", config=config, out_dir=out_dir, logger=logger, console=console)

    def _profile(self, rp) -> RadialProfile:
        if self.config.harmonic:
            return RadialProfile.constant(1.0, rp.t, rp.R_t, self.config.N)
        return solve_profile(rp.t, rp.R_t, self.config.N)

    def run(self) -> int:
        cfg = self.config
        rp = cfg.reduced()
        R = rp.R_t
        profile = self._profile(rp)

        if cfg.harmonic:
            radial = harmonic_map_energy(R, rp)
            lattice = sample_ball_field(harmonic_map_field, R, rp.t, cfg.grid_n, provenance="harmonic_map")
        else:
            radial = radial_energy(profile, rp)
            lattice = sample_ball_field(hedgehog_closure(profile), R, rp.t, cfg.grid_n, provenance="hedgehog")
        field = field_energy(lattice, rp)

        reference = 12.0 * np.pi * R
        radii = np.linspace(R / cfg.radii, R, cfg.radii)
        scan = monotonicity_scan(profile, rp, radii)
        ratios = np.array([value for _, value in scan])
        monotone = bool(np.all(np.diff(ratios) >= -1e-10))
        if not monotone:
            self.log("E(r)/r is not non-decreasing on the scanned radii", level="warning")

        self.write_json(
            "energy.json",
            {
                "elastic": radial.elastic,
                "bulk": radial.bulk,
                "total": radial.total,
                "err_est": radial.quadrature_error_estimate,
                "R": R,
                "t": rp.t,
                "grid_n": cfg.grid_n,
                "harmonic": cfg.harmonic,
                "field": {
                    "elastic": field.elastic,
                    "bulk": field.bulk,
                    "total": field.total,
                    "err_est": field.quadrature_error_estimate,
                },
                "reference_12piR": reference,
                "ratio_radial": radial.total / reference,
                "ratio_field": field.total / reference,
                "monotone": monotone,
            },
        )
        self.write_csv("monotonicity.csv", pd.DataFrame(scan, columns=["r", "E_over_r"]))

        self.summary(
            f"Energy ({'h = 1' if cfg.harmonic else 'hedgehog'}) t={rp.t:g}, R={R:g}",
            [
                ("1-D total", radial.total),
                ("1-D elastic", radial.elastic),
                ("1-D bulk", radial.bulk),
                (f"{cfg.grid_n}^3 total", field.total),
                (f"{cfg.grid_n}^3 err_est", field.quadrature_error_estimate),
                ("12 pi R", reference),
                ("E/r monotone", monotone),
            ],
        )
        return EXIT_OK
