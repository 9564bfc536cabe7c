"""Comparison report construction and lossless persistence."""

from __future__ import annotations

import pytest

from twinforge.errors import MalformedReport
from twinforge.validate import (
    ColumnDistanceRecord,
    ScriptMetrics,
    build_report,
    compare_stats,
    load_report,
    save_report,
    summary_stats,
)

from test_stats import RECORDED


def _report(scripts=(), gate_attempts=4):
    stats = summary_stats(RECORDED)
    return build_report(
        run_id="abc123def456",
        created_at="2024-05-01T12:00:00Z",
        seeds={"global": 7, "gen_tabular": 99},
        config={"seed": 7, "gate": {"tau_continuous": 0.1}},
        real_stats=stats,
        synth_stats=stats,
        comparison=compare_stats(RECORDED, RECORDED),
        distances=(
            ColumnDistanceRecord("cpu_pct", "continuous", 0.031),
            ColumnDistanceRecord("user", "discrete", 0.05),
        ),
        scripts=scripts,
        gate_attempts=gate_attempts,
    )


def test_round_trip_bit_exact(tmp_path):
    report = _report(
        scripts=(
            ScriptMetrics("gen_chrome", 0.82, 0.7071, True),
            ScriptMetrics("gen_gedit", 0.5, 0.25, False),
        )
    )
    path = tmp_path / "report-abc123def456.json"
    save_report(report, path)
    loaded = load_report(path)
    assert loaded == report
    save_report(loaded, tmp_path / "again.json")
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()


def test_report_without_scripts_is_valid(tmp_path):
    report = _report(scripts=(), gate_attempts=None)
    path = tmp_path / "r.json"
    save_report(report, path)
    loaded = load_report(path)
    assert loaded.scripts == ()
    assert loaded.gate_attempts is None


def test_gate_attempts_recorded():
    assert _report(gate_attempts=12).gate_attempts == 12


def test_malformed_report(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(MalformedReport):
        load_report(path)
    path.write_text('{"format_version": 99}', encoding="utf-8")
    with pytest.raises(MalformedReport):
        load_report(path)
