"""Brute-force baselines: naive search, substring complexity, index equality."""

from __future__ import annotations

from fractions import Fraction


def naive_search(s, t) -> list[int]:
    """All p with s[p..p+|t|) == t, by direct scan."""
    m = len(t)
    if m == 0:
        raise ValueError("empty pattern")
    n = len(s)
    if m > n:
        return []
    tt = tuple(t)
    return [p for p in range(n - m + 1) if tuple(s[p:p + m]) == tt]


def dk(s, k: int) -> int:
    """Number of distinct length-k substrings (set of slices; quadratic)."""
    if not 1 <= k <= len(s):
        raise ValueError("k out of range")
    return len({tuple(s[i:i + k]) for i in range(len(s) - k + 1)})


def delta(s) -> Fraction:
    """String complexity: max over k of d_k(s)/k, as an exact rational."""
    if len(s) == 0:
        raise ValueError("empty input")
    best = Fraction(0)
    for k in range(1, len(s) + 1):
        best = max(best, Fraction(dk(s, k), k))
    return best


def delta_fast(s) -> Fraction:
    """delta via a suffix automaton (d_k for all k in one O(n) pass).

    Used for scaling measurements where the quadratic dk() is infeasible;
    cross-checked against delta() at small sizes in the test suite.
    """
    n = len(s)
    if n == 0:
        raise ValueError("empty input")
    # suffix automaton over arbitrary integer symbols
    link = [-1]
    length = [0]
    trans: list[dict[int, int]] = [{}]
    last = 0
    for c in s:
        cur = len(length)
        length.append(length[last] + 1)
        link.append(-1)
        trans.append({})
        p = last
        while p != -1 and c not in trans[p]:
            trans[p][c] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = trans[p][c]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(length)
                length.append(length[p] + 1)
                link.append(link[q])
                trans.append(dict(trans[q]))
                while p != -1 and trans[p].get(c) == q:
                    trans[p][c] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur
    # state v contributes one distinct substring per length in
    # (length[link[v]], length[v]]
    diff = [0] * (n + 2)
    for v in range(1, len(length)):
        diff[length[link[v]] + 1] += 1
        diff[length[v] + 1] -= 1
    best = Fraction(0)
    d = 0
    for k in range(1, n + 1):
        d += diff[k]
        best = max(best, Fraction(d, k))
    return best


def reference_equal(index_a, index_b) -> bool:
    """True iff the canonical serializations are byte-identical."""
    from .serialize import canonical_bytes

    return canonical_bytes(index_a) == canonical_bytes(index_b)
