"""Structured comparison reports with lossless JSON persistence."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from twinforge.errors import MalformedReport
from twinforge.validate.stats import FieldDelta, ModalDelta, StatsComparison, SummaryStats

REPORT_FORMAT_VERSION = 1
REPORT_FILE_PATTERN = "report-{run_id}.json"


@dataclass(frozen=True)
class ScriptMetrics:
    name: str
    cosine: float
    bleu: float
    replay_ok: bool


@dataclass(frozen=True)
class ColumnDistanceRecord:
    column: str
    kind: str
    distance: float


@dataclass(frozen=True)
class ComparisonReport:
    run_id: str
    created_at: str
    seeds: dict[str, int]
    config: dict
    real_stats: SummaryStats
    synth_stats: SummaryStats
    comparison: StatsComparison
    distances: tuple[ColumnDistanceRecord, ...]
    scripts: tuple[ScriptMetrics, ...]
    gate_attempts: int | None


def build_report(
    *,
    run_id: str,
    created_at: str,
    seeds: Mapping[str, int],
    config: Mapping,
    real_stats: SummaryStats,
    synth_stats: SummaryStats,
    comparison: StatsComparison,
    distances: Sequence[ColumnDistanceRecord] = (),
    scripts: Sequence[ScriptMetrics] = (),
    gate_attempts: int | None = None,
) -> ComparisonReport:
    return ComparisonReport(
        run_id=run_id,
        created_at=created_at,
        seeds=dict(seeds),
        config=dict(config),
        real_stats=real_stats,
        synth_stats=synth_stats,
        comparison=comparison,
        distances=tuple(distances),
        scripts=tuple(scripts),
        gate_attempts=gate_attempts,
    )


def _stats_doc(stats: SummaryStats) -> dict:
    return {
        "row_count": stats.row_count,
        "means": stats.means,
        "modes": {k: [v[0], v[1]] for k, v in stats.modes.items()},
    }


def _stats_from(doc: dict) -> SummaryStats:
    return SummaryStats(
        row_count=doc["row_count"],
        means=dict(doc["means"]),
        modes={k: (v[0], v[1]) for k, v in doc["modes"].items()},
    )


def report_to_json(report: ComparisonReport) -> str:
    doc = {
        "format_version": REPORT_FORMAT_VERSION,
        "run_id": report.run_id,
        "created_at": report.created_at,
        "seeds": report.seeds,
        "config": report.config,
        "real_stats": _stats_doc(report.real_stats),
        "synth_stats": _stats_doc(report.synth_stats),
        "comparison": {
            "row_counts": list(report.comparison.row_counts),
            "continuous": {
                k: {"real": d.real, "synth": d.synth, "abs_delta": d.abs_delta, "rel_delta": d.rel_delta}
                for k, d in report.comparison.continuous.items()
            },
            "discrete": {
                k: {
                    "real": d.real,
                    "synth": d.synth,
                    "match": d.match,
                    "freq_abs_delta": d.freq_abs_delta,
                }
                for k, d in report.comparison.discrete.items()
            },
        },
        "distances": [
            {"column": d.column, "kind": d.kind, "distance": d.distance} for d in report.distances
        ],
        "scripts": [
            {"name": s.name, "cosine": s.cosine, "bleu": s.bleu, "replay_ok": s.replay_ok}
            for s in report.scripts
        ],
        "gate_attempts": report.gate_attempts,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_report(report: ComparisonReport, path: str | Path) -> None:
    Path(path).write_text(report_to_json(report), encoding="utf-8")


def load_report(path: str | Path) -> ComparisonReport:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedReport(f"{path}: not valid JSON: {exc}") from exc
    try:
        if doc["format_version"] != REPORT_FORMAT_VERSION:
            raise MalformedReport(f"{path}: unsupported format_version {doc['format_version']!r}")
        comparison = StatsComparison(
            row_counts=tuple(doc["comparison"]["row_counts"]),
            continuous={
                k: FieldDelta(d["real"], d["synth"], d["abs_delta"], d["rel_delta"])
                for k, d in doc["comparison"]["continuous"].items()
            },
            discrete={
                k: ModalDelta(d["real"], d["synth"], d["match"], d["freq_abs_delta"])
                for k, d in doc["comparison"]["discrete"].items()
            },
        )
        return ComparisonReport(
            run_id=doc["run_id"],
            created_at=doc["created_at"],
            seeds=dict(doc["seeds"]),
            config=dict(doc["config"]),
            real_stats=_stats_from(doc["real_stats"]),
            synth_stats=_stats_from(doc["synth_stats"]),
            comparison=comparison,
            distances=tuple(
                ColumnDistanceRecord(d["column"], d["kind"], d["distance"]) for d in doc["distances"]
            ),
            scripts=tuple(
                ScriptMetrics(s["name"], s["cosine"], s["bleu"], s["replay_ok"]) for s in doc["scripts"]
            ),
            gate_attempts=doc["gate_attempts"],
        )
    except (KeyError, TypeError) as exc:
        raise MalformedReport(f"{path}: {exc}") from exc
