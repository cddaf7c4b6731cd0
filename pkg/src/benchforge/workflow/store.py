"""Append-only event log backing each project.

Every state mutation is an event; replaying the log from scratch must
reconstruct the exact in-memory state (the event-sourcing invariant the
tests check). The log is a JSON-lines file, or memory-only for tests.
"""

from __future__ import annotations

import json
from pathlib import Path


class EventLog:
    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._events: list[dict] = []
        if self.path is not None and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._events.append(json.loads(line))

    def append(self, event: dict) -> None:
        self._events.append(event)
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def events(self) -> list[dict]:
        return list(self._events)

    def __len__(self) -> int:
        return len(self._events)
