"""CSV ingestion, the diagnostics report model, and deterministic JSON output.

Reports are emitted as canonical JSON: fixed key order, floating-point
values rendered with 17 significant digits (which round-trips float64
exactly), matrices as row-major arrays of arrays, and a trailing
newline.  Two runs on the same input and settings produce byte-identical
text.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ModelEnsemble,
    ObservationSeries,
    ResidualSet,
    WeightVector,
    cosine_matrix,
    correspondence_matrix,
    ensemble_score,
    model_scores,
    residuals,
)
from .diagnostics import (
    Regime,
    ResultVerdict,
    ScoreBounds,
    check_result1,
    check_result2,
    check_result3,
    classify_regime,
    schwartz_bounds,
)
from .errors import CsvFormatError, CsvParseError, ValidationError

__all__ = [
    "SCHEMA_VERSION",
    "ReportSettings",
    "DiagnosticsReport",
    "build_report",
    "emit_report",
    "parse_report",
    "render_json",
    "parse_ensemble_csv",
    "format_ensemble_csv",
]

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class ReportSettings:
    """Every tolerance and flag that shaped a report."""

    tol_equal: float
    tol_cos: float
    weights_mode: str
    opt_max_iter: int | None = None
    opt_tol: float | None = None


@dataclass(frozen=True)
class DiagnosticsReport:
    """Self-contained summary of one diagnostic run.

    Degenerate inputs surface as flags, never as sentinel numbers: with
    a zero-residual member, ``cosines`` is None and ``perfect_models``
    names it, and the angle-based verdicts and the regime are None; with
    a single model, all three verdicts and the regime are None.
    """

    interval_start: int
    interval_end: int
    n_points: int
    model_names: tuple[str, ...]
    weights_used: tuple[float, ...]
    per_model_scores: tuple[float, ...]
    correspondence: tuple[tuple[float, ...], ...]
    cosines: tuple[tuple[float, ...], ...] | None
    perfect_models: tuple[int, ...]
    ensemble_score: float
    best_index: int
    best_name: str
    s_min_sq: float
    result1: ResultVerdict | None
    result2: ResultVerdict | None
    result3: ResultVerdict | None
    bounds: ScoreBounds
    regime: Regime | None
    settings: ReportSettings


def _matrix_rows(matrix: np.ndarray) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(float(x) for x in row) for row in matrix)


def build_report(
    obs: ObservationSeries,
    ens: ModelEnsemble,
    weights: WeightVector,
    *,
    tol_equal: float = 0.05,
    tol_cos: float = 0.1,
    weights_mode: str = "custom",
    opt_max_iter: int | None = None,
    opt_tol: float | None = None,
) -> DiagnosticsReport:
    """Run the full diagnostic battery and collect it into one report."""
    rs = residuals(ens, obs)
    scores = model_scores(rs)
    corr = correspondence_matrix(rs).entries
    perfect = tuple(int(i) for i in np.flatnonzero(scores == 0.0))
    m = ens.n_models
    angles_defined = m >= 2 and not perfect

    cosines = _matrix_rows(cosine_matrix(rs)) if not perfect else None
    s_sq = ensemble_score(rs, weights)
    best = int(np.argmin(scores))
    return DiagnosticsReport(
        interval_start=int(obs.times[0]),
        interval_end=int(obs.times[-1]),
        n_points=obs.n_points,
        model_names=ens.model_names,
        weights_used=tuple(float(x) for x in weights.weights),
        per_model_scores=tuple(float(s) for s in scores),
        correspondence=_matrix_rows(corr),
        cosines=cosines,
        perfect_models=perfect,
        ensemble_score=s_sq,
        best_index=best,
        best_name=ens.model_names[best],
        s_min_sq=float(scores[best]),
        result1=check_result1(rs, weights) if m >= 2 else None,
        result2=check_result2(rs, weights) if angles_defined else None,
        result3=check_result3(rs, weights) if angles_defined else None,
        bounds=schwartz_bounds(rs, weights),
        regime=classify_regime(rs, tol_equal, tol_cos) if angles_defined else None,
        settings=ReportSettings(
            tol_equal=float(tol_equal),
            tol_cos=float(tol_cos),
            weights_mode=str(weights_mode),
            opt_max_iter=None if opt_max_iter is None else int(opt_max_iter),
            opt_tol=None if opt_tol is None else float(opt_tol),
        ),
    )


# --------------------------------------------------------------------------
# Canonical JSON
# --------------------------------------------------------------------------


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValidationError("reports must not contain NaN or infinite values")
    text = format(value, ".17g")
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"  # keep JSON floats typed as floats
    return text


def _render(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_render(item) for item in value) + "]"
    if isinstance(value, dict):
        parts = (f"{json.dumps(str(k))}:{_render(v)}" for k, v in value.items())
        return "{" + ",".join(parts) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__} to canonical JSON")


def render_json(payload: dict) -> str:
    """Canonical, newline-terminated JSON for a payload dict.

    Keys stay in insertion order, floats carry 17 significant digits,
    and no whitespace is inserted, so equal payloads yield byte-equal
    text.
    """
    return _render(payload) + "\n"


def _verdict_dict(verdict: ResultVerdict | None) -> dict | None:
    if verdict is None:
        return None
    return {
        "hypothesis_holds": verdict.hypothesis_holds,
        "conclusion_holds": verdict.conclusion_holds,
        "witnesses": [list(pair) for pair in verdict.witnesses],
        "s_min_sq": verdict.s_min_sq,
        "s_sq": verdict.s_sq,
        "best_model_index": verdict.best_model_index,
    }


def report_to_dict(report: DiagnosticsReport) -> dict:
    """Report payload with the documented key order."""
    return {
        "schema_version": SCHEMA_VERSION,
        "interval": {
            "start": report.interval_start,
            "end": report.interval_end,
            "n_points": report.n_points,
        },
        "model_names": list(report.model_names),
        "weights_used": list(report.weights_used),
        "per_model_scores": list(report.per_model_scores),
        "correspondence": [list(row) for row in report.correspondence],
        "cosines": None
        if report.cosines is None
        else [list(row) for row in report.cosines],
        "perfect_models": list(report.perfect_models),
        "ensemble_score": report.ensemble_score,
        "best": {
            "index": report.best_index,
            "name": report.best_name,
            "s_min_sq": report.s_min_sq,
        },
        "result1": _verdict_dict(report.result1),
        "result2": _verdict_dict(report.result2),
        "result3": _verdict_dict(report.result3),
        "bounds": {
            "lower": report.bounds.lower,
            "upper": report.bounds.upper,
            "actual": report.bounds.actual,
            "upper_tight": report.bounds.upper_tight,
        },
        "regime": None if report.regime is None else report.regime.value,
        "settings": {
            "tol_equal": report.settings.tol_equal,
            "tol_cos": report.settings.tol_cos,
            "weights_mode": report.settings.weights_mode,
            "opt_max_iter": report.settings.opt_max_iter,
            "opt_tol": report.settings.opt_tol,
        },
    }


def emit_report(report: DiagnosticsReport) -> str:
    """Serialize a report to canonical JSON text."""
    return render_json(report_to_dict(report))


def _verdict_from_dict(data: dict | None) -> ResultVerdict | None:
    if data is None:
        return None
    return ResultVerdict(
        hypothesis_holds=bool(data["hypothesis_holds"]),
        conclusion_holds=bool(data["conclusion_holds"]),
        witnesses=tuple((int(i), int(j)) for i, j in data["witnesses"]),
        s_min_sq=float(data["s_min_sq"]),
        s_sq=float(data["s_sq"]),
        best_model_index=int(data["best_model_index"]),
    )


def parse_report(text: str) -> DiagnosticsReport:
    """Rebuild a DiagnosticsReport from emitted JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed report JSON: {exc}") from exc
    try:
        if data["schema_version"] != SCHEMA_VERSION:
            raise ValidationError(
                f"unsupported report schema_version {data['schema_version']!r}"
            )
        cosines = data["cosines"]
        settings = data["settings"]
        return DiagnosticsReport(
            interval_start=int(data["interval"]["start"]),
            interval_end=int(data["interval"]["end"]),
            n_points=int(data["interval"]["n_points"]),
            model_names=tuple(str(n) for n in data["model_names"]),
            weights_used=tuple(float(x) for x in data["weights_used"]),
            per_model_scores=tuple(float(x) for x in data["per_model_scores"]),
            correspondence=tuple(
                tuple(float(x) for x in row) for row in data["correspondence"]
            ),
            cosines=None
            if cosines is None
            else tuple(tuple(float(x) for x in row) for row in cosines),
            perfect_models=tuple(int(i) for i in data["perfect_models"]),
            ensemble_score=float(data["ensemble_score"]),
            best_index=int(data["best"]["index"]),
            best_name=str(data["best"]["name"]),
            s_min_sq=float(data["best"]["s_min_sq"]),
            result1=_verdict_from_dict(data["result1"]),
            result2=_verdict_from_dict(data["result2"]),
            result3=_verdict_from_dict(data["result3"]),
            bounds=ScoreBounds(
                lower=float(data["bounds"]["lower"]),
                upper=float(data["bounds"]["upper"]),
                actual=float(data["bounds"]["actual"]),
                upper_tight=bool(data["bounds"]["upper_tight"]),
            ),
            regime=None if data["regime"] is None else Regime(data["regime"]),
            settings=ReportSettings(
                tol_equal=float(settings["tol_equal"]),
                tol_cos=float(settings["tol_cos"]),
                weights_mode=str(settings["weights_mode"]),
                opt_max_iter=None
                if settings["opt_max_iter"] is None
                else int(settings["opt_max_iter"]),
                opt_tol=None
                if settings["opt_tol"] is None
                else float(settings["opt_tol"]),
            ),
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed report structure: {exc}") from exc


# --------------------------------------------------------------------------
# CSV ingestion
# --------------------------------------------------------------------------


def _parse_time(cell: str, row: int, column: int) -> int:
    text = cell.strip()
    if not text:
        raise CsvParseError(row, column, "empty cell")
    if "_" in text:
        raise CsvParseError(row, column, f"invalid integer {cell!r}")
    try:
        return int(text)
    except ValueError:
        raise CsvParseError(row, column, f"invalid integer {cell!r}") from None


def _parse_value(cell: str, row: int, column: int) -> float:
    text = cell.strip()
    if not text:
        raise CsvParseError(row, column, "empty cell")
    if "_" in text:
        raise CsvParseError(row, column, f"invalid number {cell!r}")
    try:
        value = float(text)
    except ValueError:
        raise CsvParseError(row, column, f"invalid number {cell!r}") from None
    if not math.isfinite(value):
        raise CsvParseError(row, column, f"non-finite value {cell!r}")
    return value


def parse_ensemble_csv(text: str) -> tuple[ObservationSeries, ModelEnsemble]:
    """Parse aligned observations and model outputs from CSV text.

    Expected layout: a header row ``t,Y,<name>,...`` with at least one
    model column, then one row per time point.  Times must be integers
    and unique; rows are sorted by time on ingest.  Values accept
    standard decimal and scientific notation only.  Rows and columns in
    error messages are 1-based, counting the header as row 1.
    """
    rows = list(csv.reader(io.StringIO(text)))
    rows = [row for row in rows if row]  # ignore blank lines
    if not rows:
        raise CsvFormatError("input is empty")
    header = [cell.strip() for cell in rows[0]]
    if len(header) < 3:
        raise CsvFormatError(
            "expected at least 3 columns (t, Y, and one model column); "
            f"got {len(header)}"
        )
    if header[0] != "t" or header[1] != "Y":
        raise CsvFormatError(
            f"header must start with 't,Y'; got {','.join(header[:2])!r}"
        )
    names = header[2:]
    if len(rows) < 2:
        raise CsvFormatError("no data rows")

    records: list[tuple[int, float, list[float]]] = []
    seen_times: set[int] = set()
    for offset, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvParseError(
                offset,
                len(row) + 1 if len(row) < len(header) else len(header) + 1,
                f"expected {len(header)} fields, got {len(row)}",
            )
        t = _parse_time(row[0], offset, 1)
        if t in seen_times:
            raise CsvFormatError(f"duplicate time {t} at row {offset}")
        seen_times.add(t)
        y = _parse_value(row[1], offset, 2)
        outputs = [
            _parse_value(cell, offset, column)
            for column, cell in enumerate(row[2:], start=3)
        ]
        records.append((t, y, outputs))

    records.sort(key=lambda record: record[0])
    times = np.array([record[0] for record in records], dtype=np.int64)
    values = np.array([record[1] for record in records])
    outputs = np.array([record[2] for record in records]).T
    obs = ObservationSeries(times, values)
    ens = ModelEnsemble(tuple(names), outputs)
    return obs, ens


def format_ensemble_csv(obs: ObservationSeries, ens: ModelEnsemble) -> str:
    """Inverse of parse_ensemble_csv; floats use shortest exact notation."""
    if ens.n_points != obs.n_points:
        raise ValidationError("observations and ensemble must be aligned")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t", "Y", *ens.model_names])
    for i in range(obs.n_points):
        writer.writerow(
            [
                int(obs.times[i]),
                repr(float(obs.values[i])),
                *(repr(float(x)) for x in ens.outputs[:, i]),
            ]
        )
    return buffer.getvalue()
