"""On-disk JSON cache of computed DT records, one file per (r, l mod r)."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .engine import CACHE_VERSION, DTRecord
from .qseries import QSeries, format_fraction, parse_fraction


class CacheError(RuntimeError):
    pass


class CacheVersionError(CacheError):
    pass


class CacheCorruptError(CacheError):
    pass


class CacheConflictError(CacheError):
    pass


def cache_path(directory, r: int, l: int) -> Path:
    return Path(directory) / f"dt_r{r}_l{l % r}.json"


def record_to_json(record: DTRecord) -> dict:
    return {
        "version": record.version,
        "r": record.r,
        "l": record.l % record.r,
        "order": record.order,
        "values": [[d, format_fraction(v)] for d, v in sorted(record.values.items())],
        "series": record.series.to_json() if record.series is not None else None,
    }


def record_from_json(data: dict, expected_version: str = CACHE_VERSION) -> DTRecord:
    if not isinstance(data, dict) or "version" not in data:
        raise CacheCorruptError("cache document has no version tag")
    if data["version"] != expected_version:
        raise CacheVersionError(f"cache version {data['version']!r} does not match {expected_version!r}")
    try:
        r, l, order = int(data["r"]), int(data["l"]), int(data["order"])
        values = {int(d): parse_fraction(str(v)) for d, v in data["values"]}
        series = QSeries.from_json(data["series"]) if data.get("series") is not None else None
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheCorruptError(f"malformed cache document: {exc}") from exc
    if sorted(values) != list(range(order + 1)):
        raise CacheCorruptError("cache values do not cover 0..order")
    return DTRecord(r, l, order, values, series, data["version"])


def cache_load(directory, r: int, l: int, expected_version: str = CACHE_VERSION) -> Optional[DTRecord]:
    path = cache_path(directory, r, l)
    if not path.exists():
        return None
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheCorruptError(f"cannot read {path}: {exc}") from exc
    record = record_from_json(data, expected_version)
    if record.r != r or record.l != l % r:
        raise CacheCorruptError(f"{path} holds data for ({record.r}, {record.l})")
    return record


def cache_store(directory, record: DTRecord) -> None:
    """Write a record atomically; a stored record of lower order must agree with the new one."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    existing = None
    try:
        existing = cache_load(directory, record.r, record.l)
    except CacheVersionError:
        existing = None  # outdated file, overwritten below
    if existing is not None:
        common = min(existing.order, record.order)
        for d in range(common + 1):
            if existing.values[d] != record.values[d]:
                raise CacheConflictError(
                    f"new value DT({record.r},{record.l},{d}) = {record.values[d]} contradicts cached {existing.values[d]}")
        if existing.order >= record.order:
            return
    path = cache_path(directory, record.r, record.l)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(record_to_json(record), fh, indent=1)
    os.replace(tmp, path)
