"""
Run History for the Nematic Droplet Hedgehog Laboratory
-------------------------------------------------------

Stores the per-step trace of each relaxation run:
- Step index
- Lattice energy
- Sup-norm update
- Maximum node norm |Q|

Thread-safe so that experiments sharing one history (the compare command
relaxes several initial fields) can record concurrently.
"""

import threading
from collections import defaultdict, deque
from typing import Any, Dict, List

import pandas as pd

METRICS = ("step", "energy", "update", "max_norm")


class RunHistory:
    """
    Thread-safe store of relaxation traces keyed by run id.

    Example usage:
        hist = RunHistory()
        hist.store("relax-hedgehog", step=1, energy=512.3, update=1e-3, max_norm=0.99)
        trace = hist.get_history("relax-hedgehog")
    """

    def __init__(self, max_history: int = 100000):
        """
        Parameters
        ----------
        max_history : int
            Maximum number of stored entries per metric per run.
        """
        self.lock = threading.Lock()
        self.max_history = max_history
        self.memory: Dict[str, Dict[str, deque]] = defaultdict(
            lambda: {key: deque(maxlen=self.max_history) for key in METRICS}
        )

    # ------------------------------------------------------------------
    # Store new step
    # ------------------------------------------------------------------
    def store(self, run_id: str, step: int, energy: float, update: float, max_norm: float):
        with self.lock:
            mem = self.memory[run_id]
            mem["step"].append(int(step))
            mem["energy"].append(float(energy))
            mem["update"].append(float(update))
            mem["max_norm"].append(float(max_norm))

    # ------------------------------------------------------------------
    # Retrieve history
    # ------------------------------------------------------------------
    def get_history(self, run_id: str) -> Dict[str, List[Any]]:
        with self.lock:
            if run_id not in self.memory:
                return {}
            return {key: list(values) for key, values in self.memory[run_id].items()}

    def frame(self, run_id: str) -> pd.DataFrame:
        """History as a DataFrame with one row per recorded step."""
        return pd.DataFrame(self.get_history(run_id), columns=list(METRICS))

    def energy_increases(self, run_id: str) -> List[float]:
        """Positive step-to-step energy changes (empty for a dissipative run)."""
        energies = self.get_history(run_id).get("energy", [])
        return [b - a for a, b in zip(energies, energies[1:]) if b > a]
