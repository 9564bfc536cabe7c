"""Sandboxed twin instances: restore, advisory locking, scenario runs."""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from twinforge.clock import now_iso
from twinforge.errors import HashMismatch, SandboxNotEmpty, TwinLocked
from twinforge.ingest.macro import MacroScript
from twinforge.twin.image import TwinImage, unpack_archive
from twinforge.twin.manifest import DIR, LOCK_FILENAME, ManifestEntry, _hash_bytes, scan_tree
from twinforge.validate.replay import ReplayFailure, replay_validate

DEFAULT_SCREEN = (1920, 1080)


@dataclass
class TwinState:
    """Handle on an instantiated sandbox; the manifest is always a live scan."""

    sandbox: Path
    screen_width: int = DEFAULT_SCREEN[0]
    screen_height: int = DEFAULT_SCREEN[1]

    def manifest(self) -> tuple[ManifestEntry, ...]:
        return scan_tree(self.sandbox)


@contextmanager
def writer_lock(sandbox: Path):
    """Advisory exclusive lock for mutating operations (create, patch)."""
    lock = Path(sandbox) / LOCK_FILENAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise TwinLocked(f"{sandbox}: another writer holds {LOCK_FILENAME}") from None
    os.close(fd)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


def instantiate_twin(
    image: TwinImage,
    sandbox_dir: str | Path,
    screen: tuple[int, int] = DEFAULT_SCREEN,
) -> TwinState:
    """Restore an image into an empty sandbox and add a fresh ``tmp/``.

    Every file is verified against the manifest hash while restoring; one
    flipped content byte surfaces as HashMismatch.
    """
    sandbox = Path(sandbox_dir)
    if sandbox.exists() and any(sandbox.iterdir()):
        raise SandboxNotEmpty(f"{sandbox} already has contents")
    sandbox.mkdir(parents=True, exist_ok=True)

    expected = {e.path: e for e in image.manifest}
    with writer_lock(sandbox):
        for path, kind, mode, content in unpack_archive(image.archive):
            target = sandbox / path
            if kind == DIR:
                target.mkdir(parents=True, exist_ok=True)
                target.chmod(mode)
                continue
            entry = expected.get(path)
            actual = _hash_bytes(content)
            if entry is None or entry.sha256 != actual:
                raise HashMismatch(path, entry.sha256 if entry else "<absent>", actual)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(content)
            target.chmod(mode)
        tmp = sandbox / "tmp"
        tmp.mkdir(exist_ok=True)
        tmp.chmod(0o755)
    return TwinState(sandbox=sandbox, screen_width=screen[0], screen_height=screen[1])


@dataclass(frozen=True)
class ScenarioEvent:
    timestamp: str
    index: int
    command: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class EventLog:
    script_name: str
    started_at: str
    events: tuple[ScenarioEvent, ...]
    ok: bool
    first_failure: ReplayFailure | None


def run_scenario(twin: TwinState, script: MacroScript) -> EventLog:
    """Dry-run the script against the twin; never touches the sandbox tree."""
    started = now_iso()
    result = replay_validate(script, twin)
    events = tuple(
        ScenarioEvent(now_iso(), ev.index, ev.command, ev.ok, ev.detail) for ev in result.events
    )
    return EventLog(
        script_name=script.name,
        started_at=started,
        events=events,
        ok=result.ok,
        first_failure=result.first_failure,
    )
