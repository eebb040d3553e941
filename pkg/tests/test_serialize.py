import random

import pytest

from jbtx.builder import build_index
from jbtx.oracle import naive_search, reference_equal
from jbtx.serialize import (IndexFormatError, load_bytes, load_index,
                            save_bytes, save_index)
from conftest import fibonacci_word, string_family


def test_roundtrip_search_identical(tmp_path):
    rng = random.Random(81)
    for _ in range(25):
        n = rng.randrange(1, 300)
        s = string_family(rng, n)
        idx = build_index(s)
        path = tmp_path / "x.jbtx"
        save_index(idx, str(path))
        loaded = load_index(str(path))
        for _ in range(10):
            i = rng.randrange(n)
            j = rng.randrange(i, n)
            t = s[i:j + 1]
            assert loaded.search(t) == idx.search(t) == naive_search(s, t)
        assert save_bytes(loaded) == save_bytes(idx)


def test_reference_equal_basics():
    a = build_index([0, 1])
    b = build_index([1, 0])
    assert reference_equal(a, a)
    assert not reference_equal(a, b)


def test_checksum_detects_any_flip():
    idx = build_index(fibonacci_word(256))
    data = bytearray(save_bytes(idx))
    rng = random.Random(82)
    for _ in range(20):
        pos = rng.randrange(len(data))
        orig = data[pos]
        data[pos] ^= 0x41
        with pytest.raises(IndexFormatError):
            load_bytes(bytes(data))
        data[pos] = orig
    load_bytes(bytes(data))   # intact again


def test_truncation_detected():
    idx = build_index([3, 1, 4, 1, 5, 9, 2, 6])
    data = save_bytes(idx)
    for cut in (0, 3, 10, len(data) - 1):
        with pytest.raises(IndexFormatError):
            load_bytes(data[:cut])


def test_not_an_index():
    with pytest.raises(IndexFormatError):
        load_bytes(b"JUNKJUNKJUNK" + b"\x00" * 64)


def test_deterministic_mode_bit_reproducible():
    s = [ord(c) for c in "mississippi river runs deep " * 7]
    one = save_bytes(build_index(s, deterministic=True))
    two = save_bytes(build_index(s, deterministic=True))
    assert one == two
    loaded = load_bytes(one)
    assert loaded.deterministic
    assert save_bytes(loaded) == one
