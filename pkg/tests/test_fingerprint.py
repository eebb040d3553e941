import math
import random

import pytest

from jbtx.blocks import INFTY, build_hierarchy, vbit
from jbtx.fingerprint import Fingerprint, fin_rows, fin_tree, lowest_covering
from jbtx.jiggly import build_jiggly
from conftest import fibonacci_word, rand_string, string_family

INF = float("inf")


# --- literal recursive transcription of the fingerprint definition --------


def naive_fin(hier, level, a, b, out):
    rows = hier.rows
    if a > b:
        return
    row = rows[level]
    ids, begs, lens = row.ids, row.begs, row.lens
    k = level // 2
    limit = 1 << k
    bcount = b - a + 1
    if level % 2 == 0:
        i = 0
        if lens[a] <= limit:
            i = 1
            while a + i <= b and ids[a + i] == ids[a]:
                i += 1
        if i == bcount:
            out.append((ids[a], bcount, lens[a], begs[a]))
            return
        suf = 0
        if lens[b] <= limit:
            suf = 1
            while b - suf >= a and ids[b - suf] == ids[b]:
                suf += 1
        if i > 0:
            out.append((ids[a], i, lens[a], begs[a]))
        mid_lo, mid_hi = a + i, b - suf
        if mid_lo <= mid_hi:
            naive_fin(hier, level + 1, row.parent[mid_lo], row.parent[mid_hi], out)
        if suf > 0:
            out.append((ids[b], suf, lens[b], begs[b - suf + 1]))
    else:
        idp = [INF] * bcount
        idpp = [INF] * bcount
        for t in range(1, bcount):
            if lens[a + t] <= limit and lens[a + t - 1] <= limit:
                idp[t] = vbit(ids[a + t - 1], ids[a + t])
        for t in range(1, bcount):
            if idp[t] is not INF and idp[t - 1] is not INF:
                idpp[t] = vbit(idp[t - 1], idp[t])

        def cond_b(i1):  # 1-based block index
            if i1 < 3:
                return False
            c2, c1, c0 = idpp[i1 - 3], idpp[i1 - 2], idpp[i1 - 1]
            return c2 is not INF and c0 is not INF and c2 > c1 and c1 < c0

        i = bcount
        for cand in range(0, bcount + 1):
            if cand < bcount and lens[a + cand] > limit:
                i = cand
                break
            if 3 <= cand <= bcount and cond_b(cand):
                i = cand
                break
        j = bcount
        for cand in range(bcount, 0, -1):
            if lens[a + cand - 1] > limit or cond_b(cand):
                j = cand
                break
        else:
            j = bcount
        if i == bcount:
            j = bcount
        for t in range(i):
            out.append((ids[a + t], 1, lens[a + t], begs[a + t]))
        if a + i <= a + j - 1:
            naive_fin(hier, level + 1, row.parent[a + i], row.parent[a + j - 1], out)
        for t in range(j, bcount):
            out.append((ids[a + t], 1, lens[a + t], begs[a + t]))


def naive_fingerprint(hier, p, q):
    out = []
    naive_fin(hier, 0, p, q - 1, out)
    return [(e[0], e[1], e[2], e[3] - p) for e in out]


def all_spans(rng, n, cap=200):
    if n * (n + 1) // 2 <= cap:
        return [(p, q) for p in range(n) for q in range(p + 1, n + 1)]
    spans = {(0, n), (0, 1), (n - 1, n)}
    while len(spans) < cap:
        p = rng.randrange(n)
        q = rng.randrange(p + 1, n + 1)
        spans.add((p, q))
    return sorted(spans)


def test_fin_single_run():
    h = build_hierarchy([0, 0, 0])
    fp = fin_rows(h.rows, 0, 3)
    assert fp.elements == [(0, 3, 1, 0)]
    assert fp.key == ((0, 3),)


def test_fin_single_letter():
    h = build_hierarchy([9, 5])
    assert fin_rows(h.rows, 1, 2).elements == [(5, 1, 1, 0)]


def test_fin_abab_whole():
    s = [0, 1, 0, 1]
    h = build_hierarchy(s)
    assert fin_rows(h.rows, 0, 4).elements == naive_fingerprint(h, 0, 4)


def test_fin_rows_matches_naive_everywhere():
    rng = random.Random(21)
    cases = [[0, 1, 0, 1], [0] * 17, fibonacci_word(89), list(range(30))]
    cases += [string_family(rng, rng.randrange(2, 130)) for _ in range(80)]
    for s in cases:
        h = build_hierarchy(s)
        for (p, q) in all_spans(rng, len(s)):
            got = fin_rows(h.rows, p, q).elements
            want = naive_fingerprint(h, p, q)
            assert got == want, (s, p, q)


def test_fingerprint_tiling():
    rng = random.Random(22)
    for _ in range(40):
        s = string_family(rng, rng.randrange(1, 200))
        h = build_hierarchy(s)
        strings = {}
        for row in h.rows:
            for t in range(len(row)):
                strings.setdefault(row.ids[t],
                                   tuple(s[row.begs[t]:row.begs[t] + row.lens[t]]))
        for (p, q) in all_spans(rng, len(s), cap=60):
            fp = fin_rows(h.rows, p, q)
            pos = 0
            for (ident, cnt, blen, off) in fp.elements:
                assert off == pos
                assert tuple(s[p + off:p + off + cnt * blen]) == strings[ident] * cnt
                pos += cnt * blen
            assert pos == q - p


def test_equal_substrings_iff_equal_keys_exhaustive():
    rng = random.Random(23)
    for trial in range(12):
        n = rng.randrange(2, 48)
        s = string_family(rng, n)
        h = build_hierarchy(s)
        fps = {}
        for p in range(n):
            for q in range(p + 1, n + 1):
                fps[(p, q)] = fin_rows(h.rows, p, q).key
        spans = list(fps)
        for x in spans:
            for y in spans:
                same_str = tuple(s[x[0]:x[1]]) == tuple(s[y[0]:y[1]])
                assert same_str == (fps[x] == fps[y]), (s, x, y)


def test_fin_tree_matches_fin_rows():
    rng = random.Random(24)
    cases = [[0, 1, 0, 1], [0] * 33, fibonacci_word(144), list(range(40))]
    cases += [string_family(rng, rng.randrange(2, 200)) for _ in range(60)]
    for s in cases:
        h = build_hierarchy(s)
        t = build_jiggly(h)
        for (p, q) in all_spans(rng, len(s), cap=120):
            want = fin_rows(h.rows, p, q).elements
            got = fin_tree(h.reg, t.root, p, q).elements
            assert got == want, (s, p, q)


def test_fin_tree_from_inner_anchors():
    rng = random.Random(25)
    for _ in range(25):
        s = string_family(rng, rng.randrange(4, 160))
        h = build_hierarchy(s)
        t = build_jiggly(h)
        nodes = [n for n in t.nodes() if n.length > 1]
        for node in nodes[:40]:
            p = node.sbeg
            for _ in range(3):
                q = rng.randrange(p + 1, node.send + 2)
                want = fin_rows(h.rows, p, q).elements
                got = fin_tree(h.reg, node, p, q).elements
                assert [(e[0], e[1]) for e in got] == [(e[0], e[1]) for e in want]
                assert got == want


def test_lowest_covering_is_covering_and_deep():
    rng = random.Random(26)
    for _ in range(25):
        s = string_family(rng, rng.randrange(2, 150))
        h = build_hierarchy(s)
        t = build_jiggly(h)
        for node in t.nodes():
            set_links = None
        from jbtx.jiggly import set_ancestor_links
        for node in t.nodes():
            set_ancestor_links(node)
        for _ in range(30):
            p = rng.randrange(len(s))
            q = rng.randrange(p, len(s))
            node, vbeg = lowest_covering(h.reg, t.root, p, q)
            assert vbeg <= p and q <= vbeg + node.length - 1
            # no single hierarchy child covers the span
            if node.length > 1:
                from jbtx.jiggly import expand_children
                for (kid, off) in expand_children(node):
                    covers = vbeg + off <= p and q <= vbeg + off + kid.length - 1
                    assert not covers


def test_fingerprint_size_is_polylog():
    rng = random.Random(27)
    for n in (64, 256, 1024):
        worst = 0
        for _ in range(8):
            s = string_family(rng, n)
            h = build_hierarchy(s)
            for (p, q) in all_spans(rng, n, cap=40):
                m = q - p
                bound = (math.floor(math.log2(m + 1)) + 1) * \
                        (math.floor(math.log2(math.log2(n + 4))) + 2)
                worst = max(worst, len(fin_rows(h.rows, p, q)) / bound)
        assert worst <= 12


def test_fin_empty_sequence():
    h = build_hierarchy([1, 2, 3])
    fp = fin_rows(h.rows, 1, 1)
    assert fp.elements == [] and fp.key == ()


def test_fin_tree_rejects_non_covering_anchor():
    h = build_hierarchy([0, 1, 2, 3, 0, 1, 2, 3])
    t = build_jiggly(h)
    inner = [n for n in t.nodes() if n.length > 1 and n.sbeg > 0][0]
    with pytest.raises(ValueError):
        fin_tree(h.reg, inner, 0, 2)
    with pytest.raises(ValueError):
        fin_tree(h.reg, t.root, 3, 3)
