import random
from fractions import Fraction

import pytest

from jbtx.oracle import delta, delta_fast, dk, naive_search
from conftest import fibonacci_word, rand_string, string_family


def test_naive_search_examples():
    s = [ord(c) for c in "abracadabra"]
    assert naive_search(s, [ord(c) for c in "abra"]) == [0, 7]
    assert naive_search([0, 0], [0, 0, 0]) == []
    assert naive_search([0, 0, 0, 0], [0, 0]) == [0, 1, 2]
    with pytest.raises(ValueError):
        naive_search(s, [])


def test_dk_bounds_and_edges():
    rng = random.Random(101)
    for _ in range(40):
        n = rng.randrange(1, 60)
        sigma = rng.choice([1, 2, 4, 8])
        s = rand_string(rng, n, sigma)
        assert dk(s, n) == 1
        for k in range(1, n + 1):
            v = dk(s, k)
            assert 1 <= v <= min(sigma ** k, n - k + 1)


def test_delta_examples():
    assert delta([0, 0, 0, 0]) == 1
    assert delta([0, 1]) == 2
    for n in (5, 13, 55, 144):
        s = fibonacci_word(n)
        # Sturmian factor complexity: d_k = k + 1 up to the length
        assert delta(s) == max(Fraction(dk(s, k), k) for k in range(1, n + 1))
        assert delta(s) <= 2
    assert delta(fibonacci_word(89)) == 2


def test_delta_alphabet_renaming_invariant():
    rng = random.Random(102)
    for _ in range(20):
        s = rand_string(rng, rng.randrange(1, 50), 4)
        ren = {c: 1000 + c * 7 for c in set(s)}
        assert delta(s) == delta([ren[c] for c in s])


def test_delta_fast_agrees_with_set_oracle():
    rng = random.Random(103)
    for _ in range(60):
        s = string_family(rng, rng.randrange(1, 300))
        assert delta_fast(s) == delta(s)
    big = fibonacci_word(1 << 12)
    assert delta_fast(big) == delta(big[: 1 << 9]) == 2
