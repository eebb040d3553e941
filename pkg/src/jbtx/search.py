"""Query pipeline: pattern parsing, candidate splits, occurrence discovery."""

from __future__ import annotations

from .blocks import (LETTER_BOUND, Row, coalesce_runs, compute_marks,
                     group_marked)
from .fingerprint import fin_rows
from .index import Index
from .jiggly import RUN


class PatternContext:
    """Pattern hierarchy rows plus query-local overlay dictionaries.

    Identifiers of pattern blocks whose defining sequence also occurs in
    the text resolve to the text's identifiers (via the shared pair map and
    the id trie); everything else receives an overlay id from a namespace
    above every text id, so queries never mutate shared state."""

    __slots__ = ("pattern", "rows", "overlay_pair", "overlay_seq",
                 "overlay_runs", "next_overlay", "_fp")

    def __init__(self, index: Index, pattern):
        self.pattern = pattern
        self.overlay_pair: dict[tuple[int, int], int] = {}
        self.overlay_seq: dict[tuple, int] = {}
        self.overlay_runs: dict[int, tuple[int, int, int]] = {}
        self.next_overlay = index.reg.next_id + (1 << 34)
        self._fp: dict[tuple[int, int], tuple] = {}
        reg = index.reg

        def run_id(base: int, count: int, unit_len: int) -> int:
            ident = reg.pair.get((base, count))
            if ident is not None:
                return ident
            ident = self.overlay_pair.get((base, count))
            if ident is None:
                ident = self._fresh()
                self.overlay_pair[(base, count)] = ident
                self.overlay_runs[ident] = (base, count, unit_len)
            return ident

        def group_id(key: tuple) -> int:
            got = index.t_id.descend(key)
            if got is not None and got[1] and got[0].value is not None:
                return got[0].value.ident
            ident = self.overlay_seq.get(key)
            if ident is None:
                ident = self._fresh()
                self.overlay_seq[key] = ident
            return ident

        row = Row(0)
        for i, c in enumerate(pattern):
            row.ids.append(c)
            row.begs.append(i)
            row.lens.append(1)
        rows = [row]
        k = 0
        while len(rows[-1]) > 1:
            odd = coalesce_runs(rows[-1], k, run_id)
            rows.append(odd)
            if len(odd) == 1:
                break
            compute_marks(odd, k)
            rows.append(group_marked(odd, k, group_id))
            k += 1
        self.rows = rows

    def _fresh(self) -> int:
        ident = self.next_overlay
        self.next_overlay += 1
        return ident

    def fp_key(self, p: int, q: int) -> tuple:
        got = self._fp.get((p, q))
        if got is None:
            got = fin_rows(self.rows, p, q).key
            self._fp[(p, q)] = got
        return got

    def fingerprint(self, p: int, q: int):
        return fin_rows(self.rows, p, q)

    def unit_len_of(self, ident: int):
        """Repeated-unit length when ident names a run block, else None."""
        info = self.overlay_runs.get(ident)
        return info[2] if info is not None else None


def build_pattern_context(index: Index, pattern) -> PatternContext:
    if len(pattern) == 0:
        raise ValueError("empty pattern")
    return PatternContext(index, pattern)


def candidate_splits(index: Index, ctx: PatternContext) -> list[int]:
    """Split positions q at which a primary occurrence can cross a child
    boundary: element starts plus last-repetition starts of run elements."""
    m = len(ctx.pattern)
    fp = ctx.fingerprint(0, m)
    out = set()
    for i, (ident, count, base_len, off) in enumerate(fp.elements):
        if i >= 1:
            out.add(off)
        end = off + count * base_len
        if count > 1:
            out.add(end - base_len)
        else:
            ulen = index.reg.unit_of(ident)
            if ulen is not None:
                out.add(end - ulen[2])
            else:
                u = ctx.unit_len_of(ident)
                if u is not None:
                    out.add(end - u)
    return sorted(q for q in out if 0 < q < m)


def primary_occurrences(index: Index, ctx: PatternContext) -> dict[int, object]:
    """position -> anchor block, for occurrences discovered via split pairs."""
    t = ctx.pattern
    m = len(t)
    found: dict[int, object] = {}
    if m == 1:
        for leaf in index.letter_leaves.get(t[0], ()):
            found[leaf.sbeg] = leaf
        return found
    for q in candidate_splits(index, ctx):
        xl = index.t_fwd.locate(
            m - q,
            lambda f: ctx.fp_key(q, q + f),
            lambda i: t[q + i])
        if xl is None:
            continue
        yl = index.t_rev.locate(
            q,
            lambda f: ctx.fp_key(q - f, q),
            lambda i: t[q - 1 - i])
        if yl is None:
            continue
        for rec in index.rstruct.report(xl.rank, xl.rank_hi,
                                        yl.rank, yl.rank_hi):
            anchor = rec.anchor
            if rec.is_run:
                base, count, ulen = index.reg.unit_of(anchor.ident)
                assert m - q <= ulen and q <= (count - 1) * ulen
                c = count - (-(-(m - q) // ulen))   # count - ceil((m-q)/ulen)
                while c >= 1 and c * ulen >= q:
                    pos = anchor.sbeg + c * ulen - q
                    if pos not in found:
                        found[pos] = anchor
                    c -= 1
            else:
                pos = anchor.sbeg + rec.bound_off - q
                if pos not in found:
                    found[pos] = anchor
    return found


def secondary_occurrences(index: Index, primaries: dict[int, object],
                          m: int) -> set[int]:
    """Close the primary set under copy links, intermediate references and
    run periodicity, walking marked ancestors from each occurrence."""
    found = set(primaries)
    work = list(primaries)
    while work:
        p = work.pop()
        node = index.lowest_covering_real(p, p + m - 1)
        node = node.marked_anc
        while node is not None:
            if node.kind == RUN:
                ulen = node.children[0].length
                count = node.run_count
                phase = (p - node.sbeg) % ulen
                pos = node.sbeg + phase
                stop = node.send - m + 2
                while pos < stop:
                    if pos not in found:
                        found.add(pos)
                        work.append(pos)
                    pos += ulen
            if node.copy_refs:
                for ref in node.copy_refs:
                    pos = p + (ref.sbeg - node.sbeg)
                    if pos not in found:
                        found.add(pos)
                        work.append(pos)
            if node.im_refs:
                for ref in node.im_refs:
                    lo = node.sbeg + ref.ref_off
                    if lo <= p and p + m - 1 <= lo + ref.length - 1:
                        pos = p - lo + ref.sbeg
                        if pos not in found:
                            found.add(pos)
                            work.append(pos)
            parent = node.parent
            node = parent.marked_anc if parent is not None else None
    return found


def search(index: Index, pattern) -> list[int]:
    """All occurrence positions of the pattern, sorted."""
    t = list(pattern)
    m = len(t)
    if m == 0:
        raise ValueError("empty pattern")
    if m > index.n:
        return []
    if any(not 0 <= c < LETTER_BOUND for c in t):
        return []
    ctx = build_pattern_context(index, t)
    primaries = primary_occurrences(index, ctx)
    return sorted(secondary_occurrences(index, primaries, m))
