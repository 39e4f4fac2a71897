"""File-backed document store: versioned JSON documents plus
content-addressed circuit package blobs.

Writes are atomic (write-temp-then-rename); a corrupt document is
quarantined with a warning at startup instead of crashing the service.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from pathlib import Path

logger = logging.getLogger(__name__)


class DocumentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "blobs").mkdir(exist_ok=True)
        (self.root / "quarantine").mkdir(exist_ok=True)

    # -- documents -----------------------------------------------------

    def _collection_dir(self, collection: str) -> Path:
        d = self.root / collection
        d.mkdir(exist_ok=True)
        return d

    def _doc_path(self, collection: str, doc_id: str) -> Path:
        safe = "".join(c for c in doc_id if c.isalnum() or c in "-_.")
        if not safe or safe != doc_id:
            raise ValueError(f"invalid document id {doc_id!r}")
        return self._collection_dir(collection) / f"{safe}.json"

    def put(self, collection: str, doc_id: str, data: dict) -> dict:
        """Last-writer-wins upsert with a bumped version counter."""
        path = self._doc_path(collection, doc_id)
        previous = self.get(collection, doc_id)
        doc = {
            "id": doc_id,
            "version": (previous["version"] + 1) if previous else 1,
            "updated_at": time.time(),
            "data": data,
        }
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str))
        os.replace(tmp, path)  # atomic on POSIX
        return doc

    def get(self, collection: str, doc_id: str) -> dict | None:
        try:
            path = self._doc_path(collection, doc_id)
        except ValueError:
            return None
        if not path.is_file():
            return None
        try:
            return json.loads(path.read_text())
        except (json.JSONDecodeError, UnicodeDecodeError):
            self._quarantine(path)
            return None

    def list(self, collection: str) -> list[dict]:
        docs = []
        for path in sorted(self._collection_dir(collection).glob("*.json")):
            try:
                docs.append(json.loads(path.read_text()))
            except (json.JSONDecodeError, UnicodeDecodeError):
                self._quarantine(path)
        return docs

    def delete(self, collection: str, doc_id: str) -> bool:
        path = self._doc_path(collection, doc_id)
        if path.is_file():
            path.unlink()
            return True
        return False

    def _quarantine(self, path: Path) -> None:
        target = self.root / "quarantine" / f"{int(time.time()*1000)}_{path.name}"
        logger.warning("quarantining corrupt record %s -> %s", path, target)
        os.replace(path, target)

    def quarantined(self) -> list[str]:
        return sorted(p.name for p in (self.root / "quarantine").iterdir())

    # -- circuit package blobs -------------------------------------------

    @property
    def blob_root(self) -> Path:
        return self.root / "blobs"

    def put_package(self, files: dict[str, str]) -> str:
        """Store package files under their content hash; returns the hash."""
        blob = json.dumps(sorted(files.items())).encode()
        digest = hashlib.sha256(blob).hexdigest()[:24]
        target = self.blob_root / digest
        if not target.is_dir():
            tmp = self.blob_root / f".{digest}.tmp"
            tmp.mkdir(exist_ok=True)
            for fname, text in files.items():
                (tmp / fname).write_text(text)
            os.replace(tmp, target)
        return digest

    def package_path(self, digest: str) -> Path:
        return self.blob_root / digest
