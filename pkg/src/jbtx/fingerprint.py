"""Deterministic fingerprints: the exact replacement for rolling hashes.

A fingerprint is a short sequence of (id, count) elements obtained by
peeling run/range boundaries level by level; two substrings (of the text
or of a pattern parsed against the text's dictionaries) are equal iff
their fingerprints are equal.  Two evaluators are provided: one over
explicit hierarchy rows (pattern side and test oracle) and one over the
pruned tree, which reconstructs just the blocks it touches.
"""

from __future__ import annotations

from .blocks import INFTY, vbit
from .jiggly import LETTER, RUN, JNode, resolved, weighted_ancestor


class Fingerprint:
    """Elements are (ident, count, base_len, offset) tuples; equality and
    trie keys use only the (ident, count) projection."""

    __slots__ = ("elements",)

    def __init__(self, elements):
        self.elements = elements

    @property
    def key(self) -> tuple:
        return tuple((e[0], e[1]) for e in self.elements)

    def __len__(self):
        return len(self.elements)

    def __repr__(self):
        return f"Fingerprint({self.elements})"


class _OddScanState:
    """Window-local id'' chain, anchored at the window start."""

    __slots__ = ("limit", "prev_id", "prev_len", "prev_idp", "h2", "h1")

    def __init__(self, limit: int):
        self.limit = limit
        self.prev_id = None
        self.prev_len = 0
        self.prev_idp = INFTY
        self.h2 = INFTY
        self.h1 = INFTY

    def push(self, ident: int, length: int) -> bool:
        """Feed the next window block; True iff it carries a local minimum."""
        if length > self.limit:
            idp = idpp = INFTY
        elif self.prev_id is None or self.prev_len > self.limit:
            idp = INFTY
            idpp = INFTY
        else:
            idp = vbit(self.prev_id, ident)
            idpp = INFTY if self.prev_idp == INFTY else vbit(self.prev_idp, idp)
        marked = INFTY > self.h2 > self.h1 and self.h1 < idpp < INFTY
        self.prev_id = ident
        self.prev_len = length
        self.prev_idp = idp
        self.h2, self.h1 = self.h1, idpp
        return marked


def _pure_idp(ids, lens, x: int, limit: int) -> int:
    if lens[x] > limit or lens[x - 1] > limit:
        return INFTY
    return vbit(ids[x - 1], ids[x])


def _row_bmark(row, k: int) -> list[bool]:
    """Positions whose id'' chain shows a fresh local minimum; the values
    at index x depend only on blocks x-2..x, so they apply unchanged inside
    any window that starts at least two blocks earlier."""
    if row.bmark is None:
        if row.idpp is None:
            from .blocks import compute_idpp
            row.idpp = compute_idpp(row.ids, row.lens, k)
        idpp = row.idpp
        bm = [False] * len(idpp)
        for x in range(2, len(idpp)):
            c1 = idpp[x - 1]
            if c1 != INFTY and idpp[x - 2] > c1 and c1 < idpp[x] != INFTY \
                    and idpp[x - 2] != INFTY:
                bm[x] = True
        row.bmark = bm
    return row.bmark


# ---------------------------------------------------------------------------
# Evaluation over explicit rows (hierarchy of the text or of a pattern)


def fin_rows(rows, p: int, q: int) -> Fingerprint:
    """Fingerprint of positions [p, q) against explicit rows."""
    if not 0 <= p <= q <= len(rows[0].ids):
        raise ValueError("substring out of range")
    if p == q:
        return Fingerprint([])
    left: list[tuple] = []
    right_parts: list[list[tuple]] = []
    level = 0
    a, b = p, q - 1
    while True:
        row = rows[level]
        ids, begs, lens = row.ids, row.begs, row.lens
        if a == b:
            left.append((ids[a], 1, lens[a], begs[a] - p))
            break
        k = level // 2
        limit = 1 << k
        if level % 2 == 0:
            # strip maximal equal-id runs of short blocks off both ends
            if lens[a] <= limit:
                chi = rows[level + 1].child_hi[row.parent[a]]
                end = min(chi, b)
                cnt = end - a + 1
                if end == b:
                    left.append((ids[a], cnt, lens[a], begs[a] - p))
                    break
                left.append((ids[a], cnt, lens[a], begs[a] - p))
                a = end + 1
            if lens[b] <= limit:
                clo = rows[level + 1].child_lo[row.parent[b]]
                start = max(clo, a)
                right_parts.append([(ids[b], b - start + 1, lens[b],
                                     begs[start] - p)])
                b = start - 1
            if a > b:
                break
        else:
            # plain ids up to the first and after the last local delimiter
            bmark = _row_bmark(row, k)
            i_row = None
            w = a
            while w <= b:
                if lens[w] > limit:
                    i_row = w - 1
                    break
                if w - a >= 4 and bmark[w]:
                    i_row = w
                    break
                w += 1
            if i_row is None:
                for x in range(a, b + 1):
                    left.append((ids[x], 1, lens[x], begs[x] - p))
                break
            j_row = None
            w = b
            while w > i_row:
                if lens[w] > limit:
                    j_row = w
                    break
                if w - a >= 4 and bmark[w]:
                    j_row = w
                    break
                w -= 1
            if j_row is None:
                j_row = i_row   # single delimiter: the middle is empty
            for x in range(a, i_row + 1):
                left.append((ids[x], 1, lens[x], begs[x] - p))
            if j_row < b:
                right_parts.append([(ids[x], 1, lens[x], begs[x] - p)
                                    for x in range(j_row + 1, b + 1)])
            a, b = i_row + 1, j_row
            if a > b:
                break
        pa, pb = row.parent[a], row.parent[b]
        nxt = rows[level + 1]
        assert nxt.child_lo[pa] == a and nxt.child_hi[pb] == b
        a, b = pa, pb
        level += 1
    for part in reversed(right_parts):
        left.extend(part)
    return Fingerprint(left)


def _pure_idpp(ids, lens, x: int, limit: int) -> int:
    i1 = _pure_idp(ids, lens, x - 1, limit)
    i0 = _pure_idp(ids, lens, x, limit)
    if i1 == INFTY or i0 == INFTY:
        return INFTY
    return vbit(i1, i0)


# ---------------------------------------------------------------------------
# Evaluation over the pruned tree (text side at query time)


class _Cursor:
    """Positional access to the emulated hierarchy below an anchor node.

    block_at(row, pos) returns (node, vbeg) for the row-`row` block whose
    (virtual) span contains text position pos; the path from the anchor is
    cached across calls, so neighboring lookups stay cheap.
    """

    __slots__ = ("reg", "stack")

    def __init__(self, reg, anchor: JNode, vbeg: int):
        self.reg = reg
        self.stack = [(anchor, vbeg)]

    def top_row(self, idx: int) -> int:
        """Highest row the stack entry idx occupies."""
        if idx == 0:
            return self.stack[0][0].level
        return self.stack[idx - 1][0].level - 1

    def block_at(self, row: int, pos: int) -> tuple[JNode, int]:
        stack = self.stack
        while len(stack) > 1:
            node, vbeg = stack[-1]
            if vbeg <= pos <= vbeg + node.length - 1 and row <= self.top_row(len(stack) - 1):
                break
            stack.pop()
        while True:
            node, vbeg = stack[-1]
            if node.level <= row:
                return (node, vbeg)
            base = resolved(node)
            if base.kind == RUN:
                unit = base.children[0]
                ulen = unit.length
                c = (pos - vbeg) // ulen
                stack.append((unit, vbeg + c * ulen))
            else:
                from .jiggly import _group_hkids
                kids = _group_hkids(base)
                lo, hi = 0, len(kids) - 1
                rel = pos - vbeg
                while lo < hi:
                    mid = (lo + hi + 1) // 2
                    if kids[mid][1] <= rel:
                        lo = mid
                    else:
                        hi = mid - 1
                kid, off = kids[lo]
                stack.append((kid, vbeg + off))


def lowest_covering(reg, node: JNode, p: int, q: int) -> tuple[JNode, int]:
    """Deepest (virtual) block below node covering text span [p, q].

    Long left-edge descents are skipped with one weighted-ancestor query on
    the first-child link forest.
    """
    vbeg = node.sbeg
    w = q - p + 1
    while True:
        if vbeg == p and node.length > w:
            hop = weighted_ancestor(node, w, "L")
            if hop is not None and hop is not node:
                node = hop
                continue
        base = resolved(node)
        if base.kind == LETTER or node.length == 1:
            return (node, vbeg)
        if base.kind == RUN:
            unit = base.children[0]
            ulen = unit.length
            c = (p - vbeg) // ulen
            if q <= vbeg + (c + 1) * ulen - 1:
                vbeg = vbeg + c * ulen
                node = unit
                continue
            return (node, vbeg)
        from .jiggly import _group_hkids
        kids = _group_hkids(base)
        rel_p, rel_q = p - vbeg, q - vbeg
        hit = None
        for (kid, off) in kids:
            if off <= rel_p and rel_q <= off + kid.length - 1:
                hit = (kid, off)
                break
            if off > rel_p:
                break
        if hit is None:
            return (node, vbeg)
        node = hit[0]
        vbeg = vbeg + hit[1]


def fin_tree(reg, anchor: JNode, p: int, q: int) -> Fingerprint:
    """Fingerprint of text positions [p, q) below a covering anchor node."""
    if q <= p:
        raise ValueError("empty substring")
    if not (anchor.sbeg <= p and q - 1 <= anchor.send):
        raise ValueError("anchor does not cover the substring")
    start, svbeg = lowest_covering(reg, anchor, p, q - 1)
    cur = _Cursor(reg, start, svbeg)
    left: list[tuple] = []
    right_parts: list[list[tuple]] = []
    level = 0
    pos_l, pos_r = p, q - 1   # span of the unconsumed middle (text positions)
    while True:
        nl, vl = cur.block_at(level, pos_l)
        if vl + nl.length - 1 >= pos_r:
            left.append((nl.ident, 1, nl.length, vl - p))
            break
        k = level // 2
        limit = 1 << k
        if level % 2 == 0:
            if nl.length <= limit:
                pnode, pv = cur.block_at(level + 1, pos_l)
                unit = reg.unit_of(pnode.ident)
                if pnode.level == level + 1 and unit is not None:
                    base, count, ulen = unit
                    run_end = pv + count * ulen - 1
                else:
                    run_end = vl + nl.length - 1
                if run_end >= pos_r:
                    cnt = (pos_r - vl + 1) // nl.length
                    left.append((nl.ident, cnt, nl.length, vl - p))
                    break
                cnt = (run_end - vl + 1) // nl.length
                left.append((nl.ident, cnt, nl.length, vl - p))
                pos_l = run_end + 1
            nr, vr = cur.block_at(level, pos_r)
            if nr.length <= limit:
                pnode, pv = cur.block_at(level + 1, pos_r)
                unit = reg.unit_of(pnode.ident)
                if pnode.level == level + 1 and unit is not None:
                    run_start = max(pv, pos_l)
                else:
                    run_start = max(vr, pos_l)
                cnt = (vr + nr.length - run_start) // nr.length
                right_parts.append([(nr.ident, cnt, nr.length, run_start - p)])
                pos_r = run_start - 1
            if pos_l > pos_r:
                break
        else:
            scan = _OddScanState(limit)
            elems: list[tuple] = []
            win: list[tuple] = []   # (ident, length, vbeg) of scanned blocks
            i_end = None            # text end position of the plain prefix
            w = pos_l
            while w <= pos_r:
                node, vb = cur.block_at(level, w)
                if node.length > limit:
                    i_end = vb - 1
                    break
                win.append((node.ident, node.length, vb))
                if scan.push(node.ident, node.length):
                    i_end = vb + node.length - 1
                    break
                elems.append((node.ident, 1, node.length, vb - p))
                w = vb + node.length
            if i_end is None:
                left.extend(elems)
                break
            if i_end >= vb:  # the delimiter block itself is plain prefix
                elems.append((node.ident, 1, node.length, vb - p))
            left.extend(elems)
            # right scan: find the last local delimiter in the window
            j_end = None
            suffix: list[tuple] = []
            w = pos_r
            while w > i_end:
                node, vb = cur.block_at(level, w)
                if node.length > limit:
                    j_end = vb + node.length - 1
                    break
                # purity requires four predecessors inside the window
                ok = False
                if vb - pos_l > 0:
                    seq = [(node.ident, node.length, vb)]
                    x = vb
                    good = True
                    for _ in range(4):
                        if x - 1 < pos_l:
                            good = False
                            break
                        pn, pvb = cur.block_at(level, x - 1)
                        if pn.length > limit:
                            good = False
                            break
                        seq.append((pn.ident, pn.length, pvb))
                        x = pvb
                    if good:
                        seq.reverse()
                        ids4 = [e[0] for e in seq]
                        lens4 = [e[1] for e in seq]
                        c2 = _pure_idpp(ids4, lens4, 2, limit)
                        c1 = _pure_idpp(ids4, lens4, 3, limit)
                        c0 = _pure_idpp(ids4, lens4, 4, limit)
                        ok = INFTY > c2 > c1 and c1 < c0 < INFTY
                if ok:
                    j_end = vb + node.length - 1
                    break
                suffix.append((node.ident, 1, node.length, vb - p))
                w = vb - 1
            if j_end is None:
                j_end = i_end   # single delimiter: the middle is empty
            if suffix:
                suffix.reverse()
                right_parts.append(suffix)
            pos_l, pos_r = i_end + 1, j_end
            if pos_l > pos_r:
                break
        level += 1
    for part in reversed(right_parts):
        left.extend(part)
    return Fingerprint(left)
