"""CSV and JSON renderers for command output."""
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Union

import pandas as pd

from pooltest.models import CostPoint, OptimalConfig, SchemeId, SimulationEstimate, VerificationReport
from pooltest.utils.text import FLOAT_FORMAT, join_ints, round_floats


FORMATS = ("csv", "json")

COST_COLUMNS = ["scheme", "n", "p", "t"]
DISTRIBUTION_COLUMNS = ["scheme", "n", "p", "value", "prob"]
OPTIMAL_COLUMNS = ["scheme", "p", "n_opt", "t_opt", "candidates", "method"]
SIMULATION_COLUMNS = ["scheme", "n", "p", "mean", "std_error", "replications", "seed"]
RATIO_COLUMNS = ["p", "ratio"]
REPORT_COLUMNS = ["claim_id", "grid", "status", "worst_margin", "worst_location", "sign_changes"]


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def _render(rows: List[Dict[str, Any]], columns: List[str], fmt: str, payload: Any) -> str:
    if fmt == "json":
        return json.dumps(round_floats(payload), indent=2) + "\n"
    return frame_to_csv(pd.DataFrame(rows, columns=columns))


def render_cost_point(point: CostPoint, fmt: str = "csv") -> str:
    row = point.model_dump(mode="json")
    return _render([row], COST_COLUMNS, fmt, row)


def render_distribution(
    scheme: SchemeId, n: int, p: float, distribution: Sequence[Tuple[int, float]], fmt: str = "csv"
) -> str:
    rows = [
        {"scheme": scheme.value, "n": n, "p": p, "value": value, "prob": prob}
        for value, prob in distribution
    ]
    return _render(rows, DISTRIBUTION_COLUMNS, fmt, rows)


def render_optimal(config: OptimalConfig, fmt: str = "csv") -> str:
    payload = config.model_dump(mode="json")
    row = dict(payload, candidates=join_ints(config.candidates))
    return _render([row], OPTIMAL_COLUMNS, fmt, payload)


def render_simulation(estimate: SimulationEstimate, fmt: str = "csv") -> str:
    row = estimate.model_dump(mode="json")
    return _render([row], SIMULATION_COLUMNS, fmt, row)


def render_ratio(p: float, ratio: float, fmt: str = "csv") -> str:
    row = {"p": p, "ratio": ratio}
    return _render([row], RATIO_COLUMNS, fmt, row)


def render_reports(reports: Sequence[VerificationReport], fmt: str = "csv") -> str:
    payload = [report.model_dump(mode="json") for report in reports]
    rows = [
        dict(item, grid=report.grid.describe())
        for item, report in zip(payload, reports)
    ]
    if fmt == "json":
        return json.dumps(round_floats(payload), indent=2) + "\n"
    frame = pd.DataFrame(rows, columns=REPORT_COLUMNS)
    frame["sign_changes"] = pd.array([report.sign_changes for report in reports], dtype="Int64")
    return frame_to_csv(frame)


def write_frame(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(frame_to_csv(frame))
    return path
