import random

import pytest

from jbtx.blocks import build_hierarchy
from jbtx.builder import build_index
from jbtx.index import build_index_offline
from jbtx.oracle import naive_search
from jbtx.search import (build_pattern_context, candidate_splits,
                         primary_occurrences, secondary_occurrences)
from conftest import fibonacci_word, rand_string, string_family


def test_pattern_equals_text_hierarchy_when_pattern_is_text():
    rng = random.Random(61)
    for _ in range(30):
        s = string_family(rng, rng.randrange(2, 200))
        idx = build_index(s)
        hier = build_hierarchy(s)
        ctx = build_pattern_context(idx, s)
        assert len(ctx.rows) == len(hier.rows)
        for pr, hr in zip(ctx.rows, hier.rows):
            assert pr.ids == hr.ids
            assert pr.begs == hr.begs
            assert pr.lens == hr.lens


def test_pattern_with_unseen_letters_gets_overlay_ids():
    s = [0, 1, 2, 3] * 8
    idx = build_index(s)
    ctx = build_pattern_context(idx, [7, 8, 9, 7, 8, 9])
    # no generated text id can appear in the pattern rows above level 0
    text_ids = set(idx.reg.creation)
    for row in ctx.rows[1:]:
        for ident in row.ids:
            if ident >= (1 << 32):
                assert ident not in text_ids


def test_pattern_run_resolves_via_shared_pair_dict():
    s = [5] * 4
    idx = build_index(s)
    ctx = build_pattern_context(idx, [5, 5, 5])
    rid = ctx.rows[1].ids[0]
    assert idx.reg.pair.get((5, 3)) == rid if (5, 3) in idx.reg.pair \
        else rid in ctx.overlay_runs
    ctx4 = build_pattern_context(idx, [5, 5, 5, 5])
    assert ctx4.rows[1].ids[0] == idx.reg.pair[(5, 4)]


def test_candidate_splits_run_pattern():
    idx = build_index([0] * 8)
    ctx = build_pattern_context(idx, [0, 0, 0])
    assert candidate_splits(idx, ctx) == [2]


def test_candidate_splits_two_letters():
    idx = build_index([0, 1, 2])
    ctx = build_pattern_context(idx, [0, 1])
    assert candidate_splits(idx, ctx) == [1]


def test_candidates_cover_primary_boundaries():
    # for every true occurrence, some candidate q lands on a child boundary
    # of the lowest covering tree block
    rng = random.Random(62)
    for _ in range(40):
        s = string_family(rng, rng.randrange(4, 160))
        idx = build_index(s)
        for _ in range(12):
            n = len(s)
            i = rng.randrange(n)
            j = rng.randrange(i, n)
            t = s[i:j + 1]
            m = len(t)
            if m < 2:
                continue
            ctx = build_pattern_context(idx, t)
            qs = set(candidate_splits(idx, ctx))
            for p in naive_search(s, t):
                v = idx.lowest_covering_real(p, p + m - 1)
                if not v.children:
                    continue
                bounds = set()
                if v.kind == 1:  # run
                    ulen = v.children[0].length
                    bounds = {c * ulen + v.sbeg for c in range(1, v.run_count)}
                else:
                    bounds = {k.sbeg for k in v.children[1:]}
                inside = {b - p for b in bounds if p < b < p + m}
                if inside:
                    assert qs & inside, (s, t, p, sorted(qs), sorted(inside))


def test_primary_plus_secondary_equals_naive():
    rng = random.Random(63)
    for _ in range(60):
        s = string_family(rng, rng.randrange(1, 300))
        idx = build_index(s)
        n = len(s)
        for _ in range(15):
            i = rng.randrange(n)
            j = rng.randrange(i, n)
            t = s[i:j + 1]
            prim = primary_occurrences(idx, build_pattern_context(idx, t))
            allocc = secondary_occurrences(idx, prim, len(t))
            assert sorted(allocc) == naive_search(s, t)
            assert set(prim) <= allocc


def test_search_examples():
    s = [ord(c) for c in "abracadabra"]
    idx = build_index(s)
    assert idx.search([ord(c) for c in "abra"]) == [0, 7]
    assert idx.search([ord("z")]) == []
    assert idx.search(s) == [0]
    idx2 = build_index([0, 0, 0, 0])
    assert idx2.search([0]) == [0, 1, 2, 3]
    assert idx2.search([0, 0]) == [0, 1, 2]


def test_search_rejects_empty_and_handles_long():
    idx = build_index([1, 2, 3])
    with pytest.raises(ValueError):
        idx.search([])
    assert idx.search([1, 2, 3, 1]) == []


def test_search_differential_master():
    rng = random.Random(64)
    for trial in range(120):
        n = rng.randrange(1, 320)
        s = string_family(rng, n)
        idx = build_index(s)
        pats = []
        for _ in range(12):
            kind = rng.randrange(4)
            if kind == 0:
                i = rng.randrange(n)
                j = rng.randrange(i, n)
                pats.append(s[i:j + 1])
            elif kind == 1:
                pats.append([rng.randrange(6)
                             for _ in range(rng.randrange(1, 30))])
            elif kind == 2:
                i = rng.randrange(n)
                j = rng.randrange(i, n)
                t = list(s[i:j + 1])
                t[rng.randrange(len(t))] = rng.randrange(6)
                pats.append(t)
            else:
                pats.append([s[rng.randrange(n)]])
        for t in pats:
            got = idx.search(t)
            want = naive_search(s, t)
            assert got == want, (s, t)
            for p in got:
                assert s[p:p + len(t)] == list(t)


def test_search_is_read_only():
    s = [0, 1, 0, 1, 2, 0, 1] * 6
    idx = build_index(s)
    before = (dict(idx.reg.pair), idx.reg.next_id, idx.t_id.size,
              idx.t_fwd.trie.size, idx.t_rev.trie.size, len(idx.pairs))
    for t in ([0, 1], [9, 9, 9], [1, 2, 0], [0] * 5, [2]):
        idx.search(t)
    after = (dict(idx.reg.pair), idx.reg.next_id, idx.t_id.size,
             idx.t_fwd.trie.size, idx.t_rev.trie.size, len(idx.pairs))
    assert before == after


def test_periodic_run_groups():
    # occurrences buried inside non-leftmost run units are restored
    s = [0, 0, 1] * 16
    idx = build_index(s)
    for t in ([0, 1], [0, 0, 1, 0], [1, 0, 0], [0, 0]):
        assert idx.search(t) == naive_search(s, t)
    s2 = [3] * 64
    idx2 = build_index(s2)
    for m in (1, 2, 7, 63, 64):
        assert idx2.search([3] * m) == naive_search(s2, [3] * m)


def test_concurrent_queries_agree():
    from concurrent.futures import ThreadPoolExecutor
    rng = random.Random(65)
    s = string_family(rng, 300)
    idx = build_index(s)
    pats = []
    for _ in range(60):
        i = rng.randrange(len(s))
        j = rng.randrange(i, len(s))
        pats.append(s[i:j + 1])
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(idx.search, pats))
    assert got == [naive_search(s, t) for t in pats]


def test_pattern_letters_outside_namespace():
    idx = build_index([1, 2, 3])
    assert idx.search([1 << 32]) == []
    assert idx.search([-5]) == []
