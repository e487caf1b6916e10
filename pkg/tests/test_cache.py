import json

import numpy as np
import pytest

from homocount.cache import (
    CacheError,
    CacheMiss,
    cache_dir,
    cache_load,
    cache_store,
    cached,
    find_cached,
    read_header,
)
from homocount.enumeration import enumerate_pell, enumerate_sl2
from homocount.geometry import GroupVariety, PellNormForm, SpecialLinear

SL2 = GroupVariety(SpecialLinear(2))


def test_cache_dir_from_env(tmp_path):
    assert cache_dir() == tmp_path / "cache"


def test_roundtrip(tmp_path):
    res = enumerate_sl2(25)
    path = cache_store(res, tmp_path)
    back = cache_load(path, SL2)
    assert np.array_equal(back.points, res.points)
    assert (back.T, back.method, back.complete) == (res.T, res.method, res.complete)
    head = read_header(path)
    assert head["count"] == len(res) and head["schema_version"] == 1


def test_roundtrip_big_integers(tmp_path):
    res = enumerate_pell(2, 1e25)
    back = cache_load(cache_store(res, tmp_path), PellNormForm(2))
    assert [tuple(map(int, r)) for r in back.points] == [tuple(map(int, r)) for r in res.points]


def test_restricted_load_and_miss(tmp_path):
    path = cache_store(enumerate_sl2(25), tmp_path)
    assert np.array_equal(cache_load(path, SL2, 10).points, enumerate_sl2(10).points)
    with pytest.raises(CacheMiss):
        cache_load(path, SL2, 26)
    with pytest.raises(CacheMiss):
        cache_load(tmp_path / "nothing.jsonl", SL2)


def test_wrong_variety(tmp_path):
    path = cache_store(enumerate_sl2(5), tmp_path)
    with pytest.raises(CacheError):
        cache_load(path, GroupVariety(SpecialLinear(3)))


@pytest.mark.parametrize("damage", ["flip", "truncate", "header", "schema"])
def test_corruption_detected(tmp_path, damage):
    path = cache_store(enumerate_sl2(12), tmp_path)
    raw = path.read_bytes()
    head, _, body = raw.partition(b"\n")
    if damage == "flip":
        body = body.replace(b"1", b"2", 1)
    elif damage == "truncate":
        body = body[: len(body) // 2]
    elif damage == "header":
        head = head[:10]
    else:
        h = json.loads(head)
        h["schema_version"] = 99
        head = json.dumps(h).encode()
    path.write_bytes(head + b"\n" + body)
    with pytest.raises(CacheError):
        cache_load(path, SL2)


def test_corrupted_cache_recomputes(tmp_path):
    calls = []

    def compute():
        calls.append(1)
        return enumerate_sl2(15)

    first = cached(compute, SL2, 15, "parametrized", directory=tmp_path)
    path = find_cached(SL2, 15, "parametrized", directory=tmp_path)
    path.write_bytes(path.read_bytes().replace(b"[1, 0, 0, 1]", b"[1, 0, 0, 2]"))
    second = cached(compute, SL2, 15, "parametrized", directory=tmp_path)
    assert len(calls) == 2
    assert np.array_equal(first.points, second.points)
    third = cached(compute, SL2, 15, "parametrized", directory=tmp_path)
    assert len(calls) == 2 and np.array_equal(third.points, first.points)


def test_find_cached_picks_smallest_cover(tmp_path):
    for T in (10, 20, 40):
        cache_store(enumerate_sl2(T), tmp_path)
    assert read_header(find_cached(SL2, 15, "parametrized", directory=tmp_path))["T"] == "20"
    assert find_cached(SL2, 41, "parametrized", directory=tmp_path) is None
    partial = enumerate_sl2(80, 2, 0)
    cache_store(partial, tmp_path)
    assert find_cached(SL2, 60, "parametrized", directory=tmp_path) is None
