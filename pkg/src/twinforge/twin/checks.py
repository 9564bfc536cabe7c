"""Manifest assertions evaluated against a live twin."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Union

from twinforge.errors import MalformedChecks
from twinforge.twin.manifest import FILE
from twinforge.twin.sandbox import TwinState


@dataclass(frozen=True)
class FileExists:
    path: str


@dataclass(frozen=True)
class HashEquals:
    path: str
    sha256: str


@dataclass(frozen=True)
class ConfigEquals:
    file: str
    key: str
    value: str


Assertion = Union[FileExists, HashEquals, ConfigEquals]


@dataclass(frozen=True)
class CheckSpec:
    assertions: tuple[Assertion, ...]

    def __post_init__(self) -> None:
        if not self.assertions:
            raise ValueError("check spec needs at least one assertion")


@dataclass(frozen=True)
class CheckResult:
    assertion: Assertion
    passed: bool
    detail: str


def run_checks(twin: TwinState, checks: CheckSpec) -> tuple[CheckResult, ...]:
    """Pure evaluation against the live manifest and config file contents."""
    manifest = {e.path: e for e in twin.manifest()}
    results: list[CheckResult] = []
    for assertion in checks.assertions:
        if isinstance(assertion, FileExists):
            entry = manifest.get(assertion.path)
            ok = entry is not None and entry.kind == FILE
            detail = "present" if ok else "no such file"
        elif isinstance(assertion, HashEquals):
            entry = manifest.get(assertion.path)
            if entry is None or entry.kind != FILE:
                ok, detail = False, "no such file"
            else:
                ok = entry.sha256 == assertion.sha256
                detail = "hash matches" if ok else f"expected {assertion.sha256}, got {entry.sha256}"
        else:
            target = twin.sandbox / assertion.file
            if not target.is_file():
                ok, detail = False, "no such config file"
            else:
                found = None
                for line in target.read_text(encoding="utf-8").splitlines():
                    head, sep, tail = line.partition("=")
                    if sep and head.strip() == assertion.key:
                        found = tail.strip()
                if found is None:
                    ok, detail = False, f"no key {assertion.key!r}"
                else:
                    ok = found == assertion.value
                    detail = "value matches" if ok else f"expected {assertion.value!r}, got {found!r}"
        results.append(CheckResult(assertion, ok, detail))
    return tuple(results)


def checks_from_doc(doc: object) -> CheckSpec:
    if not isinstance(doc, list) or not doc:
        raise MalformedChecks("check file must hold a non-empty JSON list")
    assertions: list[Assertion] = []
    for i, item in enumerate(doc):
        where = f"check {i}"
        if not isinstance(item, dict) or "check" not in item:
            raise MalformedChecks(f"{where}: each check is an object with a 'check' field")
        kind = item["check"]
        try:
            if kind == "file_exists":
                assertions.append(FileExists(item["path"]))
            elif kind == "hash_equals":
                assertions.append(HashEquals(item["path"], item["sha256"]))
            elif kind == "config_equals":
                assertions.append(ConfigEquals(item["file"], item["key"], str(item["value"])))
            else:
                raise MalformedChecks(f"{where}: unknown check {kind!r}")
        except KeyError as exc:
            raise MalformedChecks(f"{where}: missing field {exc}") from exc
    return CheckSpec(tuple(assertions))


def load_checks(path: str | Path) -> CheckSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedChecks(f"{path}: not valid JSON: {exc}") from exc
    return checks_from_doc(doc)
