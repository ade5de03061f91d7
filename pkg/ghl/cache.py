"""Content-addressed result cache on disk."""
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Iterator, Optional

from pydantic import ValidationError

from ghl.coeffmod import GModule
from ghl.config import settings
from ghl.groups import FiniteGroup
from ghl.models import CacheStats, ResultRecord

logger = logging.getLogger(__name__)


class ResultCache:
    """JSON files under ``<dir>/<key[:2]>/<key>.json``, one per (theory, group, module, degree)."""

    def __init__(self, directory: Optional[str] = None, enabled: Optional[bool] = None, engine_version: Optional[str] = None):
        self.directory = Path(directory or settings.ghl_cache_dir)
        self.enabled = settings.ghl_cache_enabled if enabled is None else enabled
        self.engine_version = engine_version or settings.engine_version

    def key(self, group: FiniteGroup, module: GModule, theory: str, degree: int, route: Optional[str] = None) -> str:
        payload = {
            "group": group.hash(),
            "module": module.hash(),
            "theory": theory,
            "route": route,
            "degree": degree,
            "engine": self.engine_version,
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / key[:2] / f"{key}.json"

    def get(self, key: str) -> Optional[ResultRecord]:
        if not self.enabled:
            return None
        path = self._path(key)
        if not path.exists():
            logger.debug(f"Cache miss {key[:12]}")
            return None
        try:
            data = json.loads(path.read_text())
            record = ResultRecord(**data["record"])
        except (OSError, json.JSONDecodeError, KeyError, ValidationError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path}: {e}")
            return None
        logger.info(f"Cache hit for {record.theory} degree {record.degree}")
        return record.model_copy(update={"cached": True})

    def put(self, key: str, record: ResultRecord) -> None:
        if not self.enabled:
            return
        path = self._path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            entry = {"engine_version": self.engine_version, "record": record.content()}
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            with os.fdopen(fd, "w") as f:
                json.dump(entry, f, sort_keys=True)
            os.replace(tmp, path)
        except Exception as e:
            logger.error(f"Error writing cache entry {path}: {e}")
            raise

    def _entries(self) -> Iterator[Path]:
        if not self.directory.exists():
            return iter(())
        return self.directory.glob("*/*.json")

    def _is_stale(self, path: Path) -> bool:
        try:
            return json.loads(path.read_text()).get("engine_version") != self.engine_version
        except (OSError, json.JSONDecodeError):
            return True

    def stats(self) -> CacheStats:
        entries = list(self._entries())
        return CacheStats(
            directory=str(self.directory),
            entries=len(entries),
            bytes=sum(p.stat().st_size for p in entries),
            stale=sum(1 for p in entries if self._is_stale(p)),
        )

    def gc(self, remove_all: bool = False) -> int:
        """Delete entries of other engine versions (or everything); returns the count removed."""
        removed = 0
        for path in list(self._entries()):
            if remove_all or self._is_stale(path):
                path.unlink()
                removed += 1
        logger.info(f"Removed {removed} cache entries from {self.directory}")
        return removed
