"""Append-friendly JSON Lines stores for pipeline records."""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any, Iterator

from bidimatch.errors import StoreUnavailable


class JsonlStore:
    """One JSON object per line; appends are atomic under a process lock."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, record: dict[str, Any]) -> None:
        line = json.dumps(record)
        try:
            with self._lock:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
        except OSError as exc:
            raise StoreUnavailable(f"cannot append to {self.path}: {exc}") from exc

    def read_all(self) -> list[dict[str, Any]]:
        if not self.path.exists():
            return []
        try:
            with self._lock, self.path.open("r", encoding="utf-8") as fh:
                return [json.loads(line) for line in fh if line.strip()]
        except OSError as exc:
            raise StoreUnavailable(f"cannot read {self.path}: {exc}") from exc

    def replace_all(self, records: list[dict[str, Any]]) -> None:
        try:
            with self._lock:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                tmp = self.path.with_suffix(self.path.suffix + ".tmp")
                with tmp.open("w", encoding="utf-8") as fh:
                    for record in records:
                        fh.write(json.dumps(record) + "\n")
                tmp.replace(self.path)
        except OSError as exc:
            raise StoreUnavailable(f"cannot rewrite {self.path}: {exc}") from exc

    def __iter__(self) -> Iterator[dict[str, Any]]:
        return iter(self.read_all())

    def __len__(self) -> int:
        return len(self.read_all())
