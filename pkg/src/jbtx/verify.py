"""Self-check suites run by the verify command: each suite recomputes an
invariant of the loaded index against the original text."""

from __future__ import annotations

import bisect
import random

from .blocks import build_hierarchy
from .index import Index
from .jiggly import expand_string
from .oracle import naive_search, reference_equal
from .search import build_pattern_context


def _spans(rng, n, count):
    out = []
    for _ in range(count):
        p = rng.randrange(n)
        q = rng.randrange(p + 1, n + 1)
        out.append((p, q))
    return out


def suite_expansion(index: Index, s, rng) -> tuple[bool, str]:
    checked = 0
    for node in index.nodes():
        if expand_string(node) != list(s[node.sbeg:node.send + 1]):
            return False, f"node at [{node.sbeg}..{node.send}] mismatches"
        checked += 1
    return True, f"{checked} nodes expanded"


def suite_tiling(index: Index, s, rng) -> tuple[bool, str]:
    n = len(s)
    from .fingerprint import fin_tree
    for (p, q) in _spans(rng, n, 200):
        elems = fin_tree(index.reg, index.root, p, q).elements
        pos = 0
        for (ident, cnt, blen, off) in elems:
            if off != pos:
                return False, f"gap in fingerprint of [{p},{q})"
            pos += cnt * blen
        if pos != q - p:
            return False, f"fingerprint of [{p},{q}) does not tile"
    return True, "200 substrings tiled"


def suite_boundary_sparsity(index: Index, s, rng) -> tuple[bool, str]:
    hier = build_hierarchy(list(s))
    n = len(s)
    bounds = [hier.boundaries(level) for level in range(len(hier.rows))]
    for _ in range(1000):
        i = rng.randrange(n)
        j = rng.randrange(i + 1, n + 1)
        for level in range(len(hier.rows)):
            k = level // 2
            b = bounds[level]
            cnt = bisect.bisect_left(b, j) - bisect.bisect_left(b, i)
            if cnt > 64 * (-(-(j - i) // (1 << k))):
                return False, f"window [{i},{j}) level {level}"
    return True, "1000 windows within the boundary bound"


def suite_fingerprint_equality(index: Index, s, rng) -> tuple[bool, str]:
    n = len(s)
    spans = _spans(rng, n, 60)
    keys = {}
    for (p, q) in spans:
        keys[(p, q)] = index.text_fp_key(index.root, p, q)
    for a in spans:
        for b in spans:
            same = tuple(s[a[0]:a[1]]) == tuple(s[b[0]:b[1]])
            if same != (keys[a] == keys[b]):
                return False, f"text pair {a} vs {b}"
    # cross text/pattern comparisons
    for (p, q) in spans[:20]:
        t = list(s[p:q])
        ctx = build_pattern_context(index, t)
        if ctx.fp_key(0, len(t)) != keys[(p, q)]:
            return False, f"pattern of [{p},{q}) disagrees with text"
    return True, f"{len(spans)}^2 pairs compared"


def suite_search_differential(index: Index, s, rng) -> tuple[bool, str]:
    n = len(s)
    sigma = max(s) + 1 if len(s) else 2
    for trial in range(120):
        kind = trial % 3
        if kind == 0:
            p = rng.randrange(n)
            q = rng.randrange(p + 1, n + 1)
            t = list(s[p:q])
        elif kind == 1:
            t = [rng.randrange(sigma) for _ in range(rng.randrange(1, 16))]
        else:
            p = rng.randrange(n)
            q = rng.randrange(p + 1, n + 1)
            t = list(s[p:q])
            t[rng.randrange(len(t))] = rng.randrange(sigma)
        if index.search(t) != naive_search(s, t):
            return False, f"pattern {t[:20]!r}"
    return True, "120 patterns matched the scan"


def suite_stream_offline(index: Index, s, rng,
                         limit: int = 4096) -> tuple[bool, str]:
    if len(s) > limit:
        return True, f"skipped (n > {limit})"
    from .index import build_index_offline
    if not reference_equal(index, build_index_offline(list(s))):
        return False, "offline rebuild differs"
    return True, "offline rebuild byte-identical"


SUITES = [
    ("expansion", suite_expansion),
    ("tiling", suite_tiling),
    ("boundary-sparsity", suite_boundary_sparsity),
    ("fingerprint-equality", suite_fingerprint_equality),
    ("search-differential", suite_search_differential),
    ("stream-offline", suite_stream_offline),
]


def run_verification(index: Index, s, seed: int = 0):
    """Run every suite; returns a list of (name, ok, detail)."""
    results = []
    for name, fn in SUITES:
        rng = random.Random(seed ^ hash(name) & 0xFFFF)
        try:
            ok, detail = fn(index, s, rng)
        except Exception as exc:          # a crash is a failure, not an abort
            ok, detail = False, f"exception: {exc!r}"
        results.append((name, ok, detail))
    return results
