"""Append-only record-per-line persistence with crash-safe reload."""

from __future__ import annotations

import json
import os
import threading


class AppendOnlyStore:
    """One JSON record per line, appended atomically under a single-writer
    lock. Reloading discards an incomplete trailing record, so truncation at
    any byte still yields every fully written record."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)

    def append(self, record: dict):
        line = json.dumps(record, sort_keys=True) + "\n"
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
                os.fsync(handle.fileno())

    def load(self):
        if not os.path.exists(self.path):
            return []
        records = []
        with open(self.path, "r", encoding="utf-8") as handle:
            lines = handle.read().split("\n")
        for i, line in enumerate(lines):
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    break  # torn trailing record from a crash mid-write
                raise
        return records
