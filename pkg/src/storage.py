"""
Storage layer for run reports, batch dumps and planner budgets.
One JSON report per run plus a CSV of per-batch means for external auditing.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from .config import get_config
from .errors import ConfigError
from .models import ComplexityBudget, RunReport

logger = logging.getLogger(__name__)

BATCH_COLUMNS = ['estimator', 'batch_index', 'mean', 'size']


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(data: Dict[str, Any]) -> str:
    """Canonical JSON text (sorted keys) so identical runs give identical files"""
    return json.dumps(data, sort_keys=True, indent=2, default=_json_default) + "\n"


def batch_frame(report: RunReport) -> pd.DataFrame:
    """One row per (estimator, batch)"""
    rows = [
        {'estimator': name, 'batch_index': i, 'mean': mean, 'size': result.per_batch_size}
        for name, result in report.estimators.items()
        for i, mean in enumerate(result.batch_means)
    ]
    return pd.DataFrame(rows, columns=BATCH_COLUMNS)


class ReportStore:
    """Writes and reads run artifacts under one output directory"""

    def __init__(self, output_dir: Optional[Union[str, Path]] = None):
        if output_dir is None:
            output_dir = get_config().run.output_dir
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def _stem(self, scenario: str, seed: Optional[int], kind: str) -> str:
        return f"{scenario}_{kind}" if seed is None else f"{scenario}_{kind}_seed{seed}"

    def save_report(self, report: RunReport, kind: str = "report") -> Path:
        """Write the JSON report and, when batches exist, the batch CSV"""
        stem = self._stem(report.scenario.value, report.seed, kind)
        path = self.output_dir / f"{stem}.json"
        path.write_text(dumps(report.to_dict()), encoding='utf-8')
        if report.estimators:
            csv_path = self.output_dir / f"{stem}_batches.csv"
            batch_frame(report).to_csv(csv_path, index=False)
            logger.info("Wrote %s and %s", path, csv_path)
        else:
            logger.info("Wrote %s", path)
        return path

    def save_budget(self, budget: ComplexityBudget, seed: Optional[int] = None) -> Path:
        path = self.output_dir / f"{self._stem(budget.scenario.value, seed, 'plan')}.json"
        path.write_text(dumps(budget.to_dict()), encoding='utf-8')
        logger.info("Wrote %s", path)
        return path

    @staticmethod
    def load_report(path: Union[str, Path]) -> Dict[str, Any]:
        """Parsed JSON report"""
        try:
            return json.loads(Path(path).read_text(encoding='utf-8'))
        except OSError as exc:
            raise ConfigError(f"cannot read report {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"report {path} is not valid JSON: {exc}") from exc

    @staticmethod
    def load_batches(path: Union[str, Path]) -> pd.DataFrame:
        frame = pd.read_csv(path)
        missing = set(BATCH_COLUMNS) - set(frame.columns)
        if missing:
            raise ConfigError(f"batch file {path} lacks columns {sorted(missing)}")
        return frame
