"""Result files: per-trial or per-cell CSV, summary JSON and optional HTML charts.

Nothing written here carries a timestamp, so identical inputs give
identical bytes.
"""

import csv
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import plotly.graph_objects as go
import plotly.io as pio

from ..config.models import IdentityReport, SoftcoverReport, TrialResult
from ..solvers.models import RateDistortionPoint


logger = logging.getLogger(__name__)

ARTIFACT_VERSION = "1.0"
RESULTS_FILE = "results.csv"
SUMMARY_FILE = "summary.json"

CurvePoint = Union[RateDistortionPoint, SoftcoverReport]

SOFTCOVER_COLUMNS = [
    "rate", "n", "codebook_index", "tv", "mean_tv", "variant", "mutual_information", "codebook_count", "seed",
]
IDENTITY_COLUMNS = [
    "fixture",
    "n",
    "codebook_size",
    "posterior_max_error",
    "ensemble_size",
    "ensemble_max_error",
    "distortion_gap",
    "passed",
]


def format_value(value: Any) -> str:
    """Cell text: floats at 12 significant digits, booleans as 0/1, None as empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "%.12g" % value
    return str(value)


def parse_value(text: str) -> Any:
    if text == "":
        return None
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            continue
    return text


def write_rows(path: Union[str, Path], columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    """Write dict rows under a fixed header; missing cells are left empty."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row.get(column)) for column in columns])
    return str(path)


def trial_rows(results: Sequence[TrialResult]) -> Tuple[List[str], List[Dict[str, Any]]]:
    """Columns and rows for Monte Carlo trials; one distortion column per reconstruction."""
    width = len(results[0].distortions) if results else 1
    labels = ["distortion"] if width == 1 else [f"distortion{index}" for index in range(1, width + 1)]
    columns = ["trial_index", "trial_seed", "codebook_block", *labels,
               "virtual_decode_ok", "uniform_fallback", "decode_degenerate"]
    rows = []
    for result in results:
        row = result.model_dump(exclude={"distortions"})
        row.update(zip(labels, result.distortions))
        rows.append(row)
    return columns, rows


def softcover_rows(cells: Sequence[SoftcoverReport]) -> List[Dict[str, Any]]:
    """One row per codebook, in sweep order; cell fields repeat on every row."""
    rows = []
    for cell in cells:
        shared = cell.model_dump(exclude={"tv_values"})
        for index, tv in enumerate(cell.tv_values):
            rows.append({**shared, "codebook_index": index, "tv": tv})
    return rows


def curve_rows(points: Sequence[CurvePoint], problem: str = "") -> Tuple[List[str], List[Dict[str, Any]]]:
    if all(isinstance(point, SoftcoverReport) for point in points):
        return SOFTCOVER_COLUMNS, softcover_rows(points)
    if not all(isinstance(point, RateDistortionPoint) for point in points):
        raise TypeError("emit_curve takes only RateDistortionPoint or only SoftcoverReport cells")
    ordered = list(points)
    if all(len(point.rates) == 1 for point in ordered):
        ordered.sort(key=lambda point: point.distortion)
        columns = ["distortion", "rate"]
    else:
        width = max(len(point.rates) for point in ordered)
        columns = [name for index in range(1, width + 1) for name in (f"rate{index}", f"distortion{index}")]
    rows = [{"problem": problem, **point.as_row()} for point in ordered]
    return ["problem", *columns, "status", "iterations"], rows


def emit_curve(points: Sequence[CurvePoint], path: Union[str, Path], problem: str = "") -> str:
    """Write solver points or soft-covering cells as CSV.

    Solver rows lead with the problem identifier and single-rate curves are
    sorted by distortion. Soft-covering cells expand to one row per codebook
    and keep the sweep order (rates outermost).

    Raises:
        ValueError: If `points` is empty
        OSError: If the file cannot be written
    """
    if not points:
        raise ValueError("emit_curve needs at least one point")
    columns, rows = curve_rows(points, problem)
    written = write_rows(path, columns, rows)
    logger.debug(f"Wrote {len(rows)} curve rows to {written}")
    return written


def read_curve(path: Union[str, Path]) -> List[Dict[str, Any]]:
    """Parse an emitted CSV back into typed rows."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        return [{key: parse_value(value) for key, value in row.items()} for row in csv.DictReader(f)]


def write_curve_figure(points: Sequence[CurvePoint], path: Union[str, Path]) -> str:
    """Render points as an HTML line chart."""
    figure = go.Figure()
    if all(isinstance(point, SoftcoverReport) for point in points):
        for rate in dict.fromkeys(point.rate for point in points):
            cells = [point for point in points if point.rate == rate]
            figure.add_trace(go.Scatter(
                x=[cell.n for cell in cells], y=[cell.mean_tv for cell in cells],
                mode="lines+markers", name=f"R = {rate:g}",
            ))
        figure.update_layout(title="Exact soft-covering TV", xaxis_title="n", yaxis_title="mean TV")
    else:
        ordered = sorted(points, key=lambda point: point.distortion)
        figure.add_trace(go.Scatter(
            x=[point.distortion for point in ordered], y=[point.rate for point in ordered],
            mode="lines+markers", name="R(D)",
        ))
        figure.update_layout(title="Rate-distortion", xaxis_title="D", yaxis_title="R (bits)")
    pio.write_html(figure, file=str(path), include_plotlyjs="cdn", full_html=True)
    logger.info(f"Saved chart to {path}")
    return str(path)


class ResultStorage:
    """Writes results.csv and summary.json into one output directory."""

    def __init__(self, output_dir: str = "results"):
        self.output_dir = output_dir
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    def ensure_output_directory(self) -> None:
        """Create the output directory if needed.

        Raises:
            OSError: If the directory cannot be created
        """
        try:
            os.makedirs(self.output_dir, exist_ok=True)
        except OSError as e:
            self.logger.error(f"Failed to create output directory: {e}")
            raise

    def path(self, filename: str) -> str:
        return os.path.join(self.output_dir, filename)

    def save_rows(self, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
        self.ensure_output_directory()
        path = write_rows(self.path(RESULTS_FILE), columns, rows)
        self.logger.info(f"Saved results to {path}")
        return path

    def save_trials(self, results: Sequence[TrialResult]) -> str:
        return self.save_rows(*trial_rows(results))

    def save_curve(self, points: Sequence[CurvePoint], problem: str = "") -> str:
        self.ensure_output_directory()
        return emit_curve(points, self.path(RESULTS_FILE), problem)

    def save_identities(self, reports: Sequence[IdentityReport]) -> str:
        rows = [{**report.model_dump(), "passed": report.passed} for report in reports]
        return self.save_rows(IDENTITY_COLUMNS, rows)

    def save_summary(self, summary: Dict[str, Any], config: Dict[str, Any]) -> str:
        """Write summary.json with the config echo and artifact version."""
        self.ensure_output_directory()
        document = {"artifact_version": ARTIFACT_VERSION, **summary, "config": config}
        path = self.path(SUMMARY_FILE)
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(document, indent=2, ensure_ascii=False))
            f.write("\n")
        self.logger.info(f"Saved summary to {path}")
        return path

    def load_summary(self) -> Dict[str, Any]:
        with open(self.path(SUMMARY_FILE), "r", encoding="utf-8") as f:
            return json.load(f)
