"""File-backed, versioned persistence for what-if scenarios.

Each scenario lives in its own directory as one JSON document per version
(``v000001.json``, ``v000002.json``, ...).  Writes go to a temporary file
first and are renamed into place, so a crash mid-write can leave at most a
stray ``*.tmp`` file and never corrupts an existing version.  Updates use
optimistic concurrency: the caller states the version it based its edit on
and loses with :class:`VersionConflict` if someone else got there first.

Keeping every version on disk is deliberate: what-if exploration benefits
from an auditable history more than from storage thrift.
"""

from __future__ import annotations

import json
import os
import re
import shutil
import threading
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

__all__ = [
    "ScenarioDocument",
    "ScenarioNotFound",
    "VersionConflict",
    "ScenarioStore",
]

_VERSION_FILE = re.compile(r"v(\d{6})\.json\Z")


@dataclass(frozen=True)
class ScenarioDocument:
    """Persisted shape of one scenario version."""

    id: str
    name: str
    curriculum_source: str
    assignment: list[dict]  # rows: from_state_id/outcome/target_selection/probability
    schedule: dict[str, float]  # calendar year (as string, JSON-friendly) -> intake
    horizon: int
    version: int


class ScenarioNotFound(KeyError):
    def __init__(self, scenario_id: str):
        self.scenario_id = scenario_id
        super().__init__(scenario_id)


class VersionConflict(RuntimeError):
    def __init__(self, scenario_id: str, expected: int, actual: int):
        self.scenario_id = scenario_id
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"scenario {scenario_id}: expected version {expected}, store has {actual}"
        )


class ScenarioStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # -- internals -----------------------------------------------------------

    def _dir(self, scenario_id: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9_\-]+", scenario_id):
            raise ScenarioNotFound(scenario_id)
        return self.root / scenario_id

    def _latest_version(self, directory: Path) -> int:
        latest = 0
        if directory.is_dir():
            for name in os.listdir(directory):
                match = _VERSION_FILE.match(name)
                if match:
                    latest = max(latest, int(match.group(1)))
        return latest

    def _write_version(self, directory: Path, doc: ScenarioDocument) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        final = directory / f"v{doc.version:06d}.json"
        tmp = directory / f".v{doc.version:06d}.json.tmp"
        payload = json.dumps(asdict(doc), indent=2, sort_keys=True)
        with tmp.open("w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, final)

    # -- API -----------------------------------------------------------------

    def create(self, doc_fields: dict) -> ScenarioDocument:
        with self._lock:
            scenario_id = uuid.uuid4().hex[:12]
            doc = ScenarioDocument(id=scenario_id, version=1, **doc_fields)
            self._write_version(self._dir(scenario_id), doc)
            return doc

    def get(self, scenario_id: str) -> ScenarioDocument:
        directory = self._dir(scenario_id)
        version = self._latest_version(directory)
        if version == 0:
            raise ScenarioNotFound(scenario_id)
        raw = json.loads((directory / f"v{version:06d}.json").read_text(encoding="utf-8"))
        return ScenarioDocument(**raw)

    def list(self) -> list[ScenarioDocument]:
        docs = []
        if self.root.is_dir():
            for name in sorted(os.listdir(self.root)):
                if (self.root / name).is_dir():
                    try:
                        docs.append(self.get(name))
                    except ScenarioNotFound:
                        continue  # empty or half-deleted directory
        return docs

    def update(self, scenario_id: str, expected_version: int, doc_fields: dict) -> ScenarioDocument:
        with self._lock:
            current = self.get(scenario_id)
            if current.version != expected_version:
                raise VersionConflict(scenario_id, expected_version, current.version)
            doc = ScenarioDocument(id=scenario_id, version=current.version + 1, **doc_fields)
            self._write_version(self._dir(scenario_id), doc)
            return doc

    def delete(self, scenario_id: str) -> None:
        with self._lock:
            directory = self._dir(scenario_id)
            if self._latest_version(directory) == 0:
                raise ScenarioNotFound(scenario_id)
            shutil.rmtree(directory)
