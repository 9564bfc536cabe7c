"""Shared fixtures: recorded-data corpora, the 560-row mixed table, twin trees."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from twinforge.ingest import (
    CONTINUOUS,
    DISCRETE,
    Column,
    MacroScript,
    Schema,
    TabularDataset,
    parse_macro_script,
)

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")

FIXTURES = Path(__file__).parent / "fixtures"

# Mirrors the recorded-table shape: 560 rows of mixed discrete/continuous
# process data drawn from a known distribution, regenerated deterministically.
FIXTURE_DATASET_SEED = 11
FIXTURE_DATASET_ROWS = 560


@pytest.fixture(scope="session")
def top_capture_text() -> str:
    return (FIXTURES / "top_capture.txt").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def script_paths() -> list[Path]:
    return sorted((FIXTURES / "scripts").glob("*.ahk"))


@pytest.fixture(scope="session")
def script_corpus(script_paths) -> list[MacroScript]:
    return [
        parse_macro_script(p.read_text(encoding="utf-8"), name=p.stem)
        for p in script_paths
    ]


def make_fixture_dataset(
    n_rows: int = FIXTURE_DATASET_ROWS, seed: int = FIXTURE_DATASET_SEED
) -> TabularDataset:
    """Known mixed-type distribution for training and gating tests.

    Continuous columns are bimodal or unimodal Gaussians whose ranges are
    narrow relative to their means, so a distributionally close sample also
    has close column averages.
    """
    rng = np.random.default_rng(seed)
    users = rng.choice(["root", "admin", "daemon"], size=n_rows, p=[0.8, 0.125, 0.075])
    commands = rng.choice(["gedit", "top", "sh"], size=n_rows, p=[0.5, 0.3, 0.2])
    cpu_mode = rng.random(n_rows) < 0.7
    cpu = np.where(
        cpu_mode,
        rng.normal(0.10, 0.04, n_rows),
        rng.normal(0.45, 0.07, n_rows),
    ).clip(min=0.0)
    mem = rng.normal(0.99, 0.22, n_rows).clip(min=0.0)
    elapsed_mode = rng.random(n_rows) < 0.5
    elapsed = np.where(
        elapsed_mode,
        rng.normal(5.0, 2.0, n_rows),
        rng.normal(55.0, 6.0, n_rows),
    ).clip(min=0.0)

    schema = Schema(
        (
            Column("user", DISCRETE),
            Column("cpu_pct", CONTINUOUS),
            Column("mem_pct", CONTINUOUS),
            Column("elapsed_s", CONTINUOUS),
            Column("command", DISCRETE),
        )
    )
    rows = tuple(
        (str(users[i]), float(cpu[i]), float(mem[i]), float(elapsed[i]), str(commands[i]))
        for i in range(n_rows)
    )
    pids = tuple(range(1, n_rows + 1))
    return TabularDataset(schema, rows, pids)


@pytest.fixture(scope="session")
def fixture_dataset() -> TabularDataset:
    return make_fixture_dataset()


@pytest.fixture(scope="session")
def trained_model(fixture_dataset):
    """Default-config model over the 560-row fixture, shared by slow tests."""
    from twinforge.tabular import GanConfig, train_gan

    return train_gan(fixture_dataset, GanConfig(), seed=7)


def build_twin_tree(root: Path) -> Path:
    """A small system-like tree with executables, config, and a tmp dir."""
    (root / "bin").mkdir(parents=True)
    (root / "apps").mkdir()
    (root / "etc").mkdir()
    (root / "docs").mkdir()
    (root / "tmp").mkdir()
    (root / "bin" / "chrome.exe").write_bytes(b"\x7fELF chrome browser build 118\n" * 8)
    (root / "bin" / "featherpad").write_bytes(b"\x7fELF featherpad editor\n" * 6)
    (root / "bin" / "term").write_bytes(b"\x7fELF terminal emulator\n" * 5)
    (root / "apps" / "gedit").write_bytes(b"\x7fELF gnome editor\n" * 7)
    (root / "apps" / "files").write_bytes(b"\x7fELF file manager\n" * 4)
    (root / "etc" / "app.conf").write_text("mode=safe\nretries=3\nlog_level=info\n", encoding="utf-8")
    (root / "docs" / "readme.txt").write_text("local system under test\n", encoding="utf-8")
    (root / "tmp" / "scratch.txt").write_text("ephemeral\n", encoding="utf-8")
    return root


@pytest.fixture()
def twin_tree(tmp_path: Path) -> Path:
    return build_twin_tree(tmp_path / "source")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion lines where capture cannot hide them."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "CRITERION_LINES", None) if module else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
