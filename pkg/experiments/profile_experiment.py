# experiments/profile_experiment.py

from config import EXIT_OK
from tools.hedgehog_ode import envelope_report, profile_frame, solve_profile
from tools.material import h_plus_envelope_holds

from .base_experiment import BaseExperiment


class ProfileExperiment(BaseExperiment):
    """
    Solves the radial hedgehog profile and checks it against its bounds.

    Writes
    ------
    profile.csv         r, h, dh, residual at every solver node
    bounds_report.json  envelope checks with pass flags
    """

    command = "profile"

    def __init__(self, config, out_dir, logger=None, console=None):
        super().__init__(name="ProfileExperiment", config=config, out_dir=out_dir, logger=logger, console=console)

    def run(self) -> int:
        rp = self.config.reduced()
        N = self.config.N
        self.log(f"Solving profile for t={rp.t:.10g}, R={rp.R_t:.10g}, N={N}")
        profile = solve_profile(rp.t, rp.R_t, N)

        report = envelope_report(profile)
        self.write_csv("profile.csv", profile_frame(profile))
        self.write_json(
            "bounds_report.json",
            {
                "t": rp.t,
                "R": rp.R_t,
                "N": profile.N,
                "h_plus": rp.h_plus,
                "h_plus_envelope": h_plus_envelope_holds(rp.t),
                "newton_iterations": profile.iterations,
                "checks": report,
                "all_passed": all(entry["passed"] for entry in report.values()),
            },
        )

        failed = [name for name, entry in report.items() if not entry["passed"]]
        if failed:
            self.log(f"Bound checks failed: {', '.join(failed)}", level="warning")
        self.summary(
            f"Hedgehog profile t={rp.t:g}, R={rp.R_t:g}",
            [(name, f"{entry['value']:.6g} ({'PASS' if entry['passed'] else 'FAIL'})") for name, entry in report.items()],
        )
        return EXIT_OK
