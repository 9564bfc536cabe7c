"""Summary statistics and real-vs-synthetic comparisons."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from twinforge.errors import EmptyDataset, SchemaMismatch
from twinforge.ingest.tabular import CONTINUOUS, TabularDataset

REL_EPS = 1e-9


@dataclass(frozen=True)
class SummaryStats:
    """Per-column digest: means for continuous, modal category for discrete."""

    row_count: int
    means: dict[str, float]
    modes: dict[str, tuple[str, float]]  # name -> (modal category, frequency fraction)


@dataclass(frozen=True)
class FieldDelta:
    real: float
    synth: float
    abs_delta: float
    rel_delta: float


@dataclass(frozen=True)
class ModalDelta:
    real: str
    synth: str
    match: bool
    freq_abs_delta: float


@dataclass(frozen=True)
class StatsComparison:
    row_counts: tuple[int, int]
    continuous: dict[str, FieldDelta]
    discrete: dict[str, ModalDelta]


def summary_stats(dataset: TabularDataset) -> SummaryStats:
    """Arithmetic means and modal categories (ties break lexicographically)."""
    if not dataset.rows:
        raise EmptyDataset("cannot summarize an empty dataset")
    means: dict[str, float] = {}
    modes: dict[str, tuple[str, float]] = {}
    n = len(dataset.rows)
    for i, column in enumerate(dataset.schema.columns):
        values = [row[i] for row in dataset.rows]
        if column.kind == CONTINUOUS:
            means[column.name] = float(sum(values)) / n
        else:
            counts = Counter(values)
            top = max(counts.values())
            modal = min(c for c, k in counts.items() if k == top)
            modes[column.name] = (str(modal), top / n)
    return SummaryStats(row_count=n, means=means, modes=modes)


def compare_stats(real: TabularDataset, synth: TabularDataset) -> StatsComparison:
    """Absolute and relative mean deltas plus modal-category match flags."""
    if real.schema != synth.schema:
        raise SchemaMismatch("datasets under comparison must share a schema")
    rs = summary_stats(real)
    ss = summary_stats(synth)
    continuous = {}
    for name, real_mean in rs.means.items():
        synth_mean = ss.means[name]
        gap = abs(real_mean - synth_mean)
        continuous[name] = FieldDelta(
            real=real_mean,
            synth=synth_mean,
            abs_delta=gap,
            rel_delta=gap / max(abs(real_mean), REL_EPS),
        )
    discrete = {}
    for name, (real_mode, real_freq) in rs.modes.items():
        synth_mode, synth_freq = ss.modes[name]
        discrete[name] = ModalDelta(
            real=real_mode,
            synth=synth_mode,
            match=real_mode == synth_mode,
            freq_abs_delta=abs(real_freq - synth_freq),
        )
    return StatsComparison(
        row_counts=(rs.row_count, ss.row_count), continuous=continuous, discrete=discrete
    )
