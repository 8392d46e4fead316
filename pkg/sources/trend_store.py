import os
import json
from typing import Optional

from pydantic import ValidationError

from sources.errors import IOFailureError, NonMonotoneTimestampError
from sources.logger import Logger
from sources.quality import record_trend
from sources.schemas import QualityReport, TrendPoint, TrendSeries

class TrendStore:
    """
    Append-only JSON-lines history of quality runs, one file per dataset.
    """

    def __init__(self, storage_path: str):
        self.storage_path = storage_path
        self.logger = Logger("trend_store.log")
        os.makedirs(storage_path, exist_ok=True)

    def path_for(self, dataset_id: str) -> str:
        safe = "".join(c if c.isalnum() or c in "-_." else "_" for c in dataset_id)
        return os.path.join(self.storage_path, f"trend_{safe}.jsonl")

    def load(self, dataset_id: str) -> TrendSeries:
        filepath = self.path_for(dataset_id)
        points = []
        if not os.path.exists(filepath):
            return TrendSeries(dataset_id=dataset_id)
        try:
            with open(filepath, 'r', encoding='utf-8') as f:
                for line in f:
                    if line.strip():
                        points.append(TrendPoint.model_validate_json(line))
        except OSError as e:
            raise IOFailureError(f"cannot read trend {filepath}: {e}")
        except ValidationError as e:
            self.logger.error(f"Corrupt trend file {filepath}: {e}")
            raise IOFailureError(f"trend file {filepath} is corrupt")
        try:
            return TrendSeries(dataset_id=dataset_id, points=points)
        except ValidationError:
            raise NonMonotoneTimestampError(f"trend file {filepath} is not in time order")

    def append(self, report: QualityReport, series: Optional[TrendSeries] = None) -> TrendSeries:
        """Record a report; the file only ever grows by one line."""
        series = series if series is not None else self.load(report.dataset_id)
        updated = record_trend(series, report)
        point = updated.points[-1]
        filepath = self.path_for(report.dataset_id)
        try:
            with open(filepath, 'a', encoding='utf-8') as f:
                f.write(json.dumps(point.model_dump(mode="json"), sort_keys=True) + "\n")
        except OSError as e:
            raise IOFailureError(f"cannot write trend {filepath}: {e}")
        self.logger.info(f"Trend {report.dataset_id}: {len(updated.points)} runs, latest {point.aggregate:.4f}")
        return updated
