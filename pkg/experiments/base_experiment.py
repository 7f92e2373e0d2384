# experiments/base_experiment.py

from pathlib import Path
from typing import Any, Dict, Iterable, Tuple

import pandas as pd
from loguru import logger as default_logger
from rich.console import Console
from rich.table import Table

from tools.io_writers import write_csv, write_json
from tools.run_config import RunConfig


class BaseExperiment:
    """
    Base class for the experiments behind each subcommand.

    Provides:
    - name and run id
    - resolved configuration and output directory
    - logging helper with standardized prefix
    - JSON/CSV writers that embed the configuration
    - rich summary table
    """

    command = "base"

    def __init__(self, name: str, config: RunConfig, out_dir: Path, logger=None, console: Console = None):
        self.name = name
        self.config = config
        self.out_dir = Path(out_dir)
        self.run_id = f"{self.command}-seed{config.seed}"
        self.logger = logger or default_logger
        self.console = console or Console()

    def log(self, message: str, level: str = "info"):
        prefix = f"[{self.run_id}][{self.name}] "
        if level.lower() == "debug":
            self.logger.debug(prefix + message)
        elif level.lower() == "warning":
            self.logger.warning(prefix + message)
        elif level.lower() == "error":
            self.logger.error(prefix + message)
        else:
            self.logger.info(prefix + message)

    # ------------------------------------------------------------------
    # Output helpers
    # ------------------------------------------------------------------
    def write_json(self, filename: str, payload: Dict[str, Any]) -> Path:
        path = write_json(self.out_dir / filename, payload, config=self.config.resolved())
        self.log(f"Wrote {path}", level="debug")
        return path

    def write_csv(self, filename: str, frame: pd.DataFrame) -> Path:
        path = write_csv(self.out_dir / filename, frame)
        self.log(f"Wrote {path} ({len(frame)} rows)", level="debug")
        return path

    def summary(self, title: str, rows: Iterable[Tuple[str, Any]]):
        table = Table(title=title)
        table.add_column("quantity")
        table.add_column("value", justify="right")
        for key, value in rows:
            text = f"{value:.10g}" if isinstance(value, float) else str(value)
            table.add_row(key, text)
        self.console.print(table)

    # ------------------------------------------------------------------
    # Lifecycle
    # ------------------------------------------------------------------
    def execute(self) -> int:
        """Write run_config.json, then run the experiment; returns the exit code."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        write_json(self.out_dir / "run_config.json", {}, config=self.config.resolved())
        self.log(f"Starting in {self.out_dir}")
        code = self.run()
        self.log(f"Finished with exit code {code}")
        return code

    def run(self) -> int:
        raise NotImplementedError

    def __repr__(self):
        return f"{self.__class__.__name__}(name={self.name}, run_id={self.run_id})"
