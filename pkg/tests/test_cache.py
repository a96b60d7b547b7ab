"""Weight cache: round trips, pooling, environment override, bad lines."""

import json
import math
import os

import pytest

from defquant.cache import WeightCache, default_path
from defquant.weight_mc import MCResult


def mk(value, stderr, n, key="K(2,2)[x]", lam=0.5, seed=1):
    return MCResult(value, stderr, n, seed=seed, lam=lam, convention="raw",
                    key=key)


def test_round_trip(tmp_path):
    p = tmp_path / "w.jsonl"
    cache = WeightCache(p)
    assert len(cache) == 0
    cache.put(mk(0.25 + 0.01j, 2e-3, 1000))
    got = cache.get("K(2,2)[x]", 0.5)
    assert got is not None
    assert got.value == pytest.approx(0.25 + 0.01j)
    assert got.stderr == pytest.approx(2e-3)
    assert got.n_samples == 1000

    # a fresh instance reads the same record back from disk
    again = WeightCache(p).get("K(2,2)[x]", 0.5)
    assert again.value == pytest.approx(0.25 + 0.01j)


def test_lookup_is_exact_on_triple(tmp_path):
    cache = WeightCache(tmp_path / "w.jsonl")
    cache.put(mk(0.1, 1e-3, 10))
    assert cache.get("K(2,2)[x]", 0.5 + 0.1j) is None
    assert cache.get("K(2,2)[y]", 0.5) is None
    assert cache.get("K(2,2)[x]", 0.5, convention="formality") is None
    assert cache.get("K(2,2)[x]", 0.5) is not None


def test_inverse_variance_pooling(tmp_path):
    cache = WeightCache(tmp_path / "w.jsonl")
    cache.put(mk(0.30, 1e-3, 1000))
    cache.put(mk(0.33, 3e-3, 500))
    got = cache.get("K(2,2)[x]", 0.5)
    w1, w2 = 1e6, 1e6 / 9.0
    want = (w1 * 0.30 + w2 * 0.33) / (w1 + w2)
    assert got.value.real == pytest.approx(want)
    assert got.stderr == pytest.approx(math.sqrt(1.0 / (w1 + w2)))
    assert got.n_samples == 1500
    assert got.meta["pooled"] == 2
    # the pooled error is tighter than either input
    assert got.stderr < 1e-3


def test_env_var_overrides_default_path(tmp_path, monkeypatch):
    target = tmp_path / "env" / "cache.jsonl"
    monkeypatch.setenv("KW_CACHE", str(target))
    assert default_path() == target
    cache = WeightCache()
    cache.put(mk(0.5, 1e-4, 10))
    assert target.exists()
    monkeypatch.delenv("KW_CACHE")
    assert default_path() != target


def test_corrupt_lines_warn_and_are_skipped(tmp_path):
    p = tmp_path / "w.jsonl"
    good = {"key": "K", "lambda": [0.5, 0.0], "value": [0.1, 0.0],
            "stderr": 1e-3, "n_samples": 7, "seed": 0, "convention": "raw"}
    with open(p, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(good) + "\n")
        fh.write("this is not json\n")
        fh.write(json.dumps({"key": "K2", "lambda": [0.5, 0.0]}) + "\n")
        fh.write("\n")                      # blank lines are fine
        fh.write(json.dumps(dict(good, stderr="wat")) + "\n")
    with pytest.warns(UserWarning, match="corrupt cache line"):
        cache = WeightCache(p)
    assert len(cache) == 1
    assert cache.get("K", 0.5).n_samples == 7
    assert cache.get("K2", 0.5) is None


def test_missing_file_is_empty(tmp_path):
    cache = WeightCache(tmp_path / "absent.jsonl")
    assert len(cache) == 0
    assert cache.get("K", 0.5) is None
