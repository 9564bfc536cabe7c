"""Distribution acceptance gate over synthetic batches.

Sampling repeats until every per-column distance to the real data falls
under its threshold: Wasserstein-1 on continuous columns (both samples
min-max normalized by the real column's range, so the threshold is
scale-free) and total variation on discrete columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from twinforge.errors import GateExhausted
from twinforge.ingest.tabular import CONTINUOUS, TabularDataset
from twinforge.tabular.distance import emd_1d, tv_distance
from twinforge.tabular.gan import GanModel, generate_rows


@dataclass(frozen=True)
class GateConfig:
    tau_continuous: float = 0.1
    tau_discrete: float = 0.1
    max_attempts: int = 20

    def __post_init__(self) -> None:
        # tau == 0 is allowed (it makes the gate reject everything, which the
        # pipeline reports as exhaustion); negative or NaN thresholds are not.
        for name in ("tau_continuous", "tau_discrete"):
            value = getattr(self, name)
            if math.isnan(value) or value < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True)
class ColumnDistance:
    column: str
    kind: str
    distance: float


def column_distances(real: TabularDataset, synth: TabularDataset) -> tuple[ColumnDistance, ...]:
    """Per-column gate distances; zero-range continuous columns are skipped."""
    out: list[ColumnDistance] = []
    for column in real.schema.columns:
        real_values = real.column_values(column.name)
        synth_values = synth.column_values(column.name)
        if column.kind == CONTINUOUS:
            lo = min(real_values)
            span = max(real_values) - lo
            if span == 0:
                continue
            real_norm = [(v - lo) / span for v in real_values]
            synth_norm = [(v - lo) / span for v in synth_values]
            out.append(ColumnDistance(column.name, column.kind, emd_1d(real_norm, synth_norm)))
        else:
            out.append(ColumnDistance(column.name, column.kind, tv_distance(real_values, synth_values)))
    return tuple(out)


def generate_gated(
    model: GanModel,
    real: TabularDataset,
    n: int,
    gate: GateConfig = GateConfig(),
    rng: np.random.Generator | None = None,
) -> tuple[TabularDataset, int]:
    """Sample until a batch passes every threshold; returns (batch, attempts)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if real.schema != model.schema:
        raise ValueError("real dataset schema does not match the model")
    if rng is None:
        rng = np.random.default_rng(model.seed)

    worst: tuple[str, float, float] | None = None
    for attempt in range(1, gate.max_attempts + 1):
        synth = generate_rows(model, n, rng)
        offending: list[tuple[str, float, float]] = []
        for cd in column_distances(real, synth):
            threshold = gate.tau_continuous if cd.kind == CONTINUOUS else gate.tau_discrete
            if cd.distance > threshold:
                offending.append((cd.column, cd.distance, threshold))
        if not offending:
            return synth, attempt
        worst = max(offending, key=lambda item: item[1] - item[2])
    assert worst is not None
    raise GateExhausted(gate.max_attempts, worst[0], worst[1], worst[2])
