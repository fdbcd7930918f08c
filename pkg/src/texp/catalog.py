"""Append-only JSON-lines root catalog.

The file location defaults to ``texp_catalog.jsonl`` in the working
directory and can be overridden with the TEXP_CATALOG environment variable.
Entries for the same (z, n, m, p) may repeat; the latest one wins.
"""

from __future__ import annotations

import datetime
import json
import logging
import os
from pathlib import Path

from .solver import RootRecord
from .zspec import ZSpec

log = logging.getLogger(__name__)

DEFAULT_NAME = "texp_catalog.jsonl"


def catalog_path(path: str | Path | None = None) -> Path:
    if path is not None:
        return Path(path)
    return Path(os.environ.get("TEXP_CATALOG", DEFAULT_NAME))


def _z_key(z: dict) -> tuple:
    return tuple(sorted((k, v) for k, v in z.items() if k != "label"))


class Catalog:
    def __init__(self, path: str | Path | None = None):
        self.path = catalog_path(path)

    def append(self, rec: RootRecord | dict, timestamp: str | None = None) -> dict:
        entry = rec.to_dict() if isinstance(rec, RootRecord) else dict(rec)
        entry.setdefault("timestamp", timestamp or datetime.datetime.now(
            datetime.timezone.utc).isoformat(timespec="seconds"))
        line = json.dumps(entry, sort_keys=True, separators=(",", ":"))
        if self.path.parent != Path(""):
            self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
        return entry

    def entries(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    if not isinstance(entry, dict) or "z" not in entry or "id" not in entry:
                        raise ValueError("missing fields")
                except ValueError as exc:
                    log.warning("%s:%d: skipping corrupt catalog line (%s)", self.path, lineno, exc)
                    continue
                out.append(entry)
        return out

    def query(self, z: ZSpec | None = None, n: int | None = None, m: int | None = None,
              p: int | None = None, latest: bool = True) -> list[dict]:
        """Entries matching the exact z form and id fields that are given.

        With ``latest`` only the last entry per key is kept.
        """
        zk = _z_key(z.to_dict()) if z is not None else None
        hits: dict[tuple, dict] = {}
        ordered: list[dict] = []
        for e in self.entries():
            if zk is not None and _z_key(e["z"]) != zk:
                continue
            i = e["id"]
            if n is not None and i.get("n") != n:
                continue
            if m is not None and i.get("m") != m:
                continue
            if p is not None and i.get("p") != p:
                continue
            key = (_z_key(e["z"]), i.get("n"), i.get("m"), i.get("p"))
            if latest:
                hits.pop(key, None)
                hits[key] = e
            else:
                ordered.append(e)
        return list(hits.values()) if latest else ordered

    def records(self, z: ZSpec | None = None) -> list[RootRecord]:
        out = []
        for e in self.query(z):
            try:
                out.append(RootRecord.from_dict(e))
            except (KeyError, ValueError, TypeError) as exc:
                log.warning("skipping unusable catalog entry (%s)", exc)
        return out
