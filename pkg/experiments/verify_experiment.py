# experiments/verify_experiment.py

from config import EXIT_OK, EXIT_USAGE
from tools.hedgehog_ode import solve_profile
from tools.identities import run_identity_suite
from tools.sphere_quadrature import sphere_rule

from .base_experiment import BaseExperiment


class VerifyExperiment(BaseExperiment):
    """
    Runs the identity battery against a freshly solved profile.

    The exit code is 0 only when every check passes.
    """

    command = "verify"

    def __init__(self, config, out_dir, logger=None, console=None):
        super().__init__(name="VerifyExperiment", config=config, out_dir=out_dir, logger=logger, console=console)

    def run(self) -> int:
        cfg = self.config
        # reject a bad quadrature order before the profile solve
        sphere_rule(cfg.order)
        rp = cfg.reduced()
        profile = solve_profile(rp.t, rp.R_t, cfg.N)

        checks = run_identity_suite(
            profile,
            rp,
            seed=cfg.seed,
            n_seeds=cfg.n_seeds,
            order=cfg.order,
            threads=cfg.threads,
            material=cfg.material() if cfg.is_material else None,
        )
        all_passed = all(check.passed for check in checks)
        self.write_json(
            "verify.json",
            {
                "checks": [
                    {"identity_name": c.name, "value": c.value, "tolerance": c.tolerance, "pass": c.passed}
                    for c in checks
                ],
                "all_passed": all_passed,
            },
        )

        n_failed = sum(not c.passed for c in checks)
        if n_failed:
            self.log(f"{n_failed} of {len(checks)} identity checks failed", level="error")
        else:
            self.log(f"All {len(checks)} identity checks passed")
        self.summary(
            "Identity checks",
            [(c.name, f"{c.value:.3e} <= {c.tolerance:.0e} {'PASS' if c.passed else 'FAIL'}") for c in checks],
        )
        return EXIT_OK if all_passed else EXIT_USAGE
