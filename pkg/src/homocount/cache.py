"""Persistent enumeration cache.

One file per (variety hash, method, norm mode, T).  The first line is a JSON
header ``{schema_version, variety_hash, T, norm_mode, method, complete,
count, checksum}``; each following line is one point as a JSON array of
integers.  The checksum is the SHA-256 hex digest of the body bytes.  Files
are written to a temporary name and renamed into place.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from .enumeration import EnumerationResult
from .geometry import variety_hash

SCHEMA_VERSION = 1
CACHE_ENV = "HOMOCOUNT_CACHE"
DEFAULT_CACHE_DIR = ".homocount-cache"


class CacheError(RuntimeError):
    """Cache file unusable: corrupted, truncated or from another schema."""


class CacheMiss(LookupError):
    """The cache holds no enumeration covering the requested bound."""


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE_DIR))


def cache_filename(result_or_key) -> str:
    r = result_or_key
    return f"{variety_hash(r.variety)}-{r.method}-{r.norm_mode}-T{_fmt_T(r.T)}.jsonl"


def _fmt_T(T) -> str:
    return str(Fraction(T)).replace("/", "_")


def _body(points: np.ndarray) -> bytes:
    return "".join(json.dumps([int(v) for v in row]) + "\n" for row in points).encode()


def atomic_write(path: Path, data: bytes) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cache_store(result: EnumerationResult, path=None) -> Path:
    """Persist an enumeration; ``path`` may be a directory or a file name."""
    path = Path(path) if path is not None else cache_dir()
    if path.suffix != ".jsonl":
        path = path / cache_filename(result)
    body = _body(result.points)
    header = {
        "schema_version": SCHEMA_VERSION,
        "variety_hash": variety_hash(result.variety),
        "T": str(Fraction(result.T)),
        "norm_mode": result.norm_mode,
        "method": result.method,
        "complete": bool(result.complete),
        "count": len(result),
        "checksum": hashlib.sha256(body).hexdigest(),
    }
    atomic_write(path, (json.dumps(header, sort_keys=True) + "\n").encode() + body)
    return path


def read_header(path) -> dict:
    with open(path, "rb") as fh:
        line = fh.readline()
    try:
        return json.loads(line)
    except ValueError as exc:
        raise CacheError(f"{path}: unreadable header") from exc


def cache_load(path, variety, T=None) -> EnumerationResult:
    """Load and verify a cached enumeration.

    Raises :class:`CacheMiss` when ``T`` exceeds the cached bound and
    :class:`CacheError` on any integrity problem; never returns unverified
    data.  A smaller ``T`` returns the restricted point set.
    """
    path = Path(path)
    if not path.exists():
        raise CacheMiss(f"{path} does not exist")
    raw = path.read_bytes()
    head, sep, body = raw.partition(b"\n")
    if not sep:
        raise CacheError(f"{path}: truncated header")
    try:
        header = json.loads(head)
    except ValueError as exc:
        raise CacheError(f"{path}: unreadable header") from exc
    if header.get("schema_version") != SCHEMA_VERSION:
        raise CacheError(f"{path}: schema version {header.get('schema_version')} != {SCHEMA_VERSION}")
    if header.get("variety_hash") != variety_hash(variety):
        raise CacheError(f"{path}: cached for a different variety")
    if hashlib.sha256(body).hexdigest() != header.get("checksum"):
        raise CacheError(f"{path}: checksum mismatch")
    cached_T = Fraction(header["T"])
    if T is not None and Fraction(T) > cached_T:
        raise CacheMiss(f"{path}: cached up to T={cached_T}, requested {T}")
    rows = [json.loads(line) for line in body.decode().splitlines()]
    if len(rows) != header["count"]:
        raise CacheError(f"{path}: expected {header['count']} points, found {len(rows)}")
    width = int(np.prod(variety.shape))
    big = any(abs(v) > 3 * 10**9 for row in rows for v in row)
    pts = np.array(rows, dtype=object if big else np.int64).reshape(-1, width)
    T_val = int(cached_T) if cached_T.denominator == 1 else float(cached_T)
    result = EnumerationResult(variety, T_val, header["norm_mode"], header["method"], pts, header["complete"])
    if T is not None and Fraction(T) < cached_T:
        result = result.restrict(T)
    return result


def find_cached(variety, T, method: str, norm_mode: str = "euclidean", directory=None) -> Optional[Path]:
    """Cache file with the smallest bound >= T for this variety, method and norm."""
    directory = Path(directory) if directory is not None else cache_dir()
    best = None
    for path in directory.glob(f"{variety_hash(variety)}-{method}-{norm_mode}-T*.jsonl"):
        try:
            header = read_header(path)
            bound = Fraction(header["T"])
        except (CacheError, KeyError, ValueError, OSError):
            continue
        if bound >= Fraction(T) and header.get("complete") and (best is None or bound < best[0]):
            best = (bound, path)
    return None if best is None else best[1]


def cached(enumerator, variety, T, method: str, norm_mode: str = "euclidean", directory=None):
    """Load from cache or compute with ``enumerator()`` and store.

    Corrupted files are recomputed and overwritten, never trusted.
    """
    directory = Path(directory) if directory is not None else cache_dir()
    probe = EnumerationResult(variety, T, norm_mode, method, np.zeros((0, int(np.prod(variety.shape)))), True)
    path = find_cached(variety, T, method, norm_mode, directory) or directory / cache_filename(probe)
    try:
        return cache_load(path, variety, T)
    except (CacheMiss, CacheError):
        result = enumerator()
        cache_store(result, directory / cache_filename(probe))
        return result
