"""Pruned block tree with intermediate back-links and its traversal.

A retained block keeps its children; repeated material is represented by
childless copy leaves (pointing at the leftmost block with the same id) and
by intermediate leaves (pointing at an earlier run of sibling blocks).
Expansion of any node back into original-hierarchy children is done lazily,
so huge runs never materialize eagerly.
"""

from __future__ import annotations

from .blocks import Hierarchy, IdRegistry

LETTER = 0
RUN = 1
GROUP = 2
COPY = 3
INTERMEDIATE = 4

KIND_NAMES = {LETTER: "letter", RUN: "run", GROUP: "group",
              COPY: "copy", INTERMEDIATE: "intermediate"}

# sequence sentinels used in subrange-parsing keys: WALL marks clipped
# history at a range start, STOP terminates a range-final subrange key
WALL = -1
STOP = -2


class JNode:
    __slots__ = ("sbeg", "send", "ident", "level", "kind", "children",
                 "parent", "run_count", "copy_link", "im_link", "im_off",
                 "im_r", "ref_off", "child_ids", "al", "ar", "al_up", "ar_up",
                 "copy_refs", "im_refs", "marked_anc", "_hkids")

    def __init__(self, sbeg: int, send: int, ident, level: int, kind: int):
        self.sbeg = sbeg
        self.send = send
        self.ident = ident
        self.level = level
        self.kind = kind
        self.children: list[JNode] = []
        self.parent: JNode | None = None
        self.run_count = 0
        self.copy_link: JNode | None = None
        self.im_link: JNode | None = None
        self.im_off = 0
        self.im_r = 0
        self.ref_off = 0          # text offset of the referenced copy in im_link
        self.child_ids: tuple[int, ...] | None = None
        self.al: JNode | None = None
        self.ar: JNode | None = None
        self.al_up: list[JNode] | None = None
        self.ar_up: list[JNode] | None = None
        self.copy_refs: list[JNode] | None = None
        self.im_refs: list[JNode] | None = None
        self.marked_anc: JNode | None = None
        self._hkids = None

    @property
    def length(self) -> int:
        return self.send - self.sbeg + 1

    def __repr__(self):
        return (f"JNode({KIND_NAMES[self.kind]} id={self.ident} "
                f"[{self.sbeg}..{self.send}] lvl={self.level})")


def resolved(node: JNode) -> JNode:
    """Follow a copy link to the node that actually carries children."""
    return node.copy_link if node.kind == COPY else node


# ---------------------------------------------------------------------------
# rleft / rright over explicit rows, and the offline greedy subrange parser


def rleft_key(marks, ids, m: int, l: int) -> tuple[int, ...]:
    """Ids of the unmarked left neighborhood of m, WALL-prefixed if clipped."""
    h = 0
    while h < l and m - h - 1 >= 0 and not marks[m - h - 1]:
        h += 1
    seq = tuple(ids[m - h:m])
    return seq if h == l else (WALL,) + seq


def rright_key(marks, ids, m: int, l: int) -> tuple[int, ...]:
    """Ids rightward from m up to (and including) the first marked block."""
    h = 0
    n = len(ids)
    while h < l:
        if m + h >= n:
            break
        h += 1
        if marks[m + h - 1]:
            break
    return tuple(ids[m:m + h])


def _window_dict(hier: Hierarchy, level: int, r: int):
    """Min row position per (rleft(.,4r), rright(.,5r)) key on one row."""
    key = (level, r)
    cached = hier._window_cache.get(key)
    if cached is not None:
        return cached
    row = hier.rows[level]
    marks, ids = row.marks, row.ids
    d: dict = {}
    for p in range(len(ids)):
        wk = (rleft_key(marks, ids, p, 4 * r), rright_key(marks, ids, p, 5 * r))
        if wk not in d:
            d[wk] = p
    hier._window_cache[key] = d
    return d


def _rright_dict(hier: Hierarchy, level: int, r: int):
    key = (level, -r)
    cached = hier._window_cache.get(key)
    if cached is not None:
        return cached
    row = hier.rows[level]
    marks, ids = row.marks, row.ids
    d: dict = {}
    for p in range(len(ids)):
        rk = rright_key(marks, ids, p, r)
        if rk not in d:
            d[rk] = p
    hier._window_cache[key] = d
    return d


def parse_subranges(hier: Hierarchy, level: int, lo: int, hi: int):
    """Greedy left-to-right parse of range blocks lo..hi into (m, r, m'').

    A subrange of length r > 1 requires an earlier row position whose
    4r-left/5r-right neighborhoods match; m'' is the smallest row position
    matching the bare r-right neighborhood.  m'' is None when r == 1.
    """
    row = hier.rows[level]
    marks, ids = row.marks, row.ids
    out = []
    m = lo
    while m <= hi:
        r = 1
        while m + r <= hi:
            cand = r + 1
            wk = (rleft_key(marks, ids, m, 4 * cand),
                  rright_key(marks, ids, m, 5 * cand))
            pos = _window_dict(hier, level, cand).get(wk)
            if pos is None or pos >= m:
                break
            r = cand
        if r > 1:
            rk = rright_key(marks, ids, m, r)
            mpp = _rright_dict(hier, level, r)[rk]
            out.append((m, r, mpp))
        else:
            out.append((m, 1, None))
        m += r
    return out


# ---------------------------------------------------------------------------
# Offline construction of the pruned tree


class JigglyTree:
    __slots__ = ("root", "leftmost", "reg", "n", "node_count")

    def __init__(self, root: JNode, leftmost: dict[int, JNode],
                 reg: IdRegistry, n: int, node_count: int):
        self.root = root
        self.leftmost = leftmost
        self.reg = reg
        self.n = n
        self.node_count = node_count

    def nodes(self):
        """All live nodes, preorder, children in text order."""
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def _leftmost_begs(hier: Hierarchy) -> dict[int, int]:
    left: dict[int, int] = {}
    for row in hier.rows:
        ids, begs = row.ids, row.begs
        for i in range(len(ids)):
            d = ids[i]
            b = begs[i]
            if d not in left or b < left[d]:
                left[d] = b
    return left


def build_jiggly(hier: Hierarchy, with_intermediates: bool = True) -> JigglyTree:
    """Prune the hierarchy and (optionally) replace repeated subranges."""
    reg = hier.reg
    rows = hier.rows
    left = _leftmost_begs(hier)
    node_map: dict[int, JNode] = {}
    count = 0

    def set_links(node: JNode, first_id: int, last_id: int) -> None:
        if node.length > 1:
            node.al = node_map[first_id]
            node.ar = node_map[last_id]

    def make(ident: int, sbeg: int, length: int) -> JNode:
        nonlocal count
        count += 1
        if length == 1:
            node = JNode(sbeg, sbeg, ident, 0, LETTER)
            if left[ident] == sbeg:
                node_map[ident] = node
            return node
        level = reg.creation_level(ident)
        if sbeg > left[ident]:
            node = JNode(sbeg, sbeg + length - 1, ident, level, COPY)
            target = node_map[ident]
            node.copy_link = target
            seq = _defining_seq(target)
            set_links(node, seq[0], seq[-1])
            return node

        unit = reg.unit_of(ident)
        if unit is not None:
            base, rcount, ulen = unit
            node = JNode(sbeg, sbeg + length - 1, ident, level, RUN)
            node.run_count = rcount
            node_map[ident] = node
            child = make(base, sbeg, ulen)
            child.parent = node
            node.children = [child]
            set_links(node, base, base)
            return node

        # group: locate the defining range on the row below its creation row
        gi = hier.index_of(level, sbeg)
        grow = rows[level]
        src = rows[level - 1]
        clo, chi = grow.child_lo[gi], grow.child_hi[gi]
        node = JNode(sbeg, sbeg + length - 1, ident, level, GROUP)
        node.child_ids = tuple(src.ids[clo:chi + 1])
        node_map[ident] = node
        if with_intermediates:
            pieces = parse_subranges(hier, level - 1, clo, chi)
        else:
            pieces = [(m, 1, None) for m in range(clo, chi + 1)]
        kids: list[JNode] = []
        for (m, r, mpp) in pieces:
            if r == 1:
                kid = make(src.ids[m], src.begs[m], src.lens[m])
            else:
                send = src.begs[m + r - 1] + src.lens[m + r - 1] - 1
                kid = JNode(src.begs[m], send, None, level - 1, INTERMEDIATE)
                count += 1
                pidx = src.parent[mpp]
                tid = grow.ids[pidx]
                target = node if tid == ident and grow.begs[pidx] == sbeg \
                    else node_map[tid]
                assert target.sbeg == left[tid]
                kid.im_link = target
                kid.im_off = mpp - grow.child_lo[pidx]
                kid.im_r = r
                kid.ref_off = src.begs[mpp] - target.sbeg
                set_links(kid, src.ids[m], src.ids[m + r - 1])
            kid.parent = node
            kids.append(kid)
        node.children = kids
        set_links(node, src.ids[clo], src.ids[chi])
        return node

    def _defining_seq(target: JNode) -> tuple[int, ...]:
        if target.kind == RUN:
            base = reg.unit_of(target.ident)[0]
            return (base, base)
        return target.child_ids

    top = rows[-1]
    root = make(top.ids[0], 0, top.lens[0])
    return JigglyTree(root, node_map, reg, len(hier.s), count)


def prune(hier: Hierarchy) -> JigglyTree:
    """Rules 1-4 only (no intermediate blocks); used as a staging oracle."""
    return build_jiggly(hier, with_intermediates=False)


# ---------------------------------------------------------------------------
# Lazy expansion back into hierarchy children


def hk_count(node: JNode) -> int:
    """Number of original-hierarchy children of a block (copies resolved)."""
    node = resolved(node)
    if node.kind == RUN:
        return node.run_count
    if node.kind == INTERMEDIATE:
        return node.im_r
    if node.kind == GROUP:
        return len(_group_hkids(node))
    return 0


def _group_hkids(node: JNode) -> list[tuple[JNode, int]]:
    """Resolved (child, offset-in-node) list for a group node; memoized.

    Intermediate children are replaced by the blocks of the earlier
    occurrence they point at; the recursion terminates because an
    overlapping intermediate inside the target always covers at most half
    as many blocks.
    """
    got = node._hkids
    if got is not None:
        return got
    out: list[tuple[JNode, int]] = []
    for kid in node.children:
        if kid.kind != INTERMEDIATE:
            out.append((kid, kid.sbeg - node.sbeg))
        else:
            base = kid.sbeg - node.sbeg
            for (g, off) in _im_slice(kid):
                out.append((g, base + off))
    node._hkids = out
    return out


def _im_slice(kid: JNode) -> list[tuple[JNode, int]]:
    """(block, offset-in-kid) pairs for the blocks an intermediate stands for."""
    target = resolved(kid.im_link)
    sub = _group_hkids(target)[kid.im_off:kid.im_off + kid.im_r]
    base = sub[0][1]
    return [(g, off - base) for (g, off) in sub]


def hk_at(node: JNode, i: int) -> tuple[JNode, int]:
    """i-th original-hierarchy child as (block node, offset in node)."""
    node = resolved(node)
    if node.kind == RUN:
        ulen = node.children[0].length
        return (node.children[0], i * ulen)
    if node.kind == INTERMEDIATE:
        return _im_slice(node)[i]
    return _group_hkids(node)[i]


def expand_children(node: JNode) -> list[tuple[JNode, int]]:
    """All original-hierarchy children as (block, offset-in-node) pairs.

    Callers that may see huge runs should use hk_count/hk_at instead.
    """
    if node.kind == LETTER or node.length == 1:
        raise ValueError("letter blocks have no children")
    base = resolved(node)
    if base.kind == RUN:
        ulen = base.children[0].length
        return [(base.children[0], c * ulen) for c in range(base.run_count)]
    if base.kind == INTERMEDIATE:
        return list(_im_slice(base))
    return list(_group_hkids(base))


def read_slice(node: JNode, lo: int, hi: int, out: list[int]) -> None:
    """Append the letters of the node's span slice [lo, hi) to out."""
    if lo >= hi:
        return
    stack = [(node, lo, hi)]
    while stack:
        node, lo, hi = stack.pop()
        node = resolved(node)
        if node.kind == LETTER:
            out.append(node.ident)
            continue
        if node.kind == RUN:
            unit = node.children[0]
            ulen = unit.length
            c0, c1 = lo // ulen, (hi - 1) // ulen
            pieces = []
            for c in range(c0, c1 + 1):
                a = max(lo, c * ulen) - c * ulen
                b = min(hi, (c + 1) * ulen) - c * ulen
                pieces.append((unit, a, b))
            stack.extend(reversed(pieces))
            continue
        kids = _group_hkids(node) if node.kind == GROUP else _im_slice(node)
        pieces = []
        for (kid, off) in kids:
            a = max(lo, off)
            b = min(hi, off + kid.length)
            if a < b:
                pieces.append((kid, a - off, b - off))
        stack.extend(reversed(pieces))


def expand_string(node: JNode) -> list[int]:
    """The exact text substring covered by the node."""
    out: list[int] = []
    read_slice(node, 0, node.length, out)
    return out


# ---------------------------------------------------------------------------
# Binary lifting over the A_L / A_R link forests


def set_ancestor_links(node: JNode) -> None:
    """Build the lifting tables from node.al / node.ar (call once per node)."""
    for attr, up_attr in (("al", "al_up"), ("ar", "ar_up")):
        target = getattr(node, attr)
        if target is None:
            continue
        ups = [target]
        t = 0
        while True:
            prev_ups = getattr(ups[t], up_attr)
            if prev_ups is None or len(prev_ups) <= t:
                break
            ups.append(prev_ups[t])
            t += 1
        setattr(node, up_attr, ups)


def weighted_ancestor(node: JNode, w: int, forest: str = "L") -> JNode | None:
    """Farthest block along the link chain with length >= w (None if none)."""
    if node.length < w:
        return None
    up_attr = "al_up" if forest == "L" else "ar_up"
    cur = node
    while True:
        ups = getattr(cur, up_attr)
        if not ups:
            return cur
        moved = False
        for t in range(len(ups) - 1, -1, -1):
            if t < len(ups) and ups[t].length >= w:
                cur = ups[t]
                moved = True
                break
        if not moved:
            return cur
