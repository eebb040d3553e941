"""The queryable index: pruned tree plus satellite search structures."""

from __future__ import annotations

from .blocks import IdRegistry
from .fingerprint import fin_tree
from .jiggly import (COPY, GROUP, INTERMEDIATE, LETTER, RUN, JNode,
                     build_jiggly, read_slice)
from .tries import CompactedTrie, ZFastTrie


class PairRec:
    """One (x, y) point of the reporting structure: an anchor block and the
    child boundary (text offset within the anchor) it represents."""

    __slots__ = ("x", "y", "anchor", "bound_off", "is_run")

    def __init__(self, x, y, anchor: JNode, bound_off: int, is_run: bool):
        self.x = x
        self.y = y
        self.anchor = anchor
        self.bound_off = bound_off
        self.is_run = is_run


class BuildStats:
    __slots__ = ("n", "nodes_created", "nodes_discarded", "live_peak",
                 "wall_time", "relabels", "point_count")

    def __init__(self):
        self.n = 0
        self.nodes_created = 0
        self.nodes_discarded = 0
        self.live_peak = 0
        self.wall_time = 0.0
        self.relabels = 0
        self.point_count = 0

    @property
    def live(self) -> int:
        return self.nodes_created - self.nodes_discarded

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "nodes_created": self.nodes_created,
            "nodes_discarded": self.nodes_discarded,
            "nodes_live": self.live,
            "live_peak": self.live_peak,
            "wall_time": self.wall_time,
            "order_relabels": self.relabels,
            "parse_points": self.point_count,
        }


def _anchor_key(node: JNode) -> tuple:
    return (node.sbeg, node.send, node.kind, node.level)


def fwd_reader(payload, lo, hi):
    out: list[int] = []
    read_slice(payload, lo, hi, out)
    return out


def rev_reader(payload, lo, hi):
    node, plen = payload
    out: list[int] = []
    read_slice(node, plen - hi, plen - lo, out)
    out.reverse()
    return out


def id_reader(payload, lo, hi):
    return payload.child_ids[lo:hi]


class Index:
    __slots__ = ("n", "deterministic", "reg", "root", "leftmost", "t_id",
                 "t_fwd", "t_rev", "pairs", "rstruct", "letter_leaves",
                 "node_count", "stats", "_fp_cache")

    def __init__(self, n: int, reg: IdRegistry, root: JNode,
                 deterministic: bool = False):
        self.n = n
        self.reg = reg
        self.root = root
        self.deterministic = deterministic
        self.leftmost: dict[int, JNode] = {}
        self.t_id = CompactedTrie(id_reader)
        self.t_fwd = ZFastTrie(fwd_reader, self._stored_fp_fwd)
        self.t_rev = ZFastTrie(rev_reader, self._stored_fp_rev)
        self.pairs: list[PairRec] = []
        self.rstruct = None
        self.letter_leaves: dict[int, list[JNode]] = {}
        self.node_count = 0
        self.stats = BuildStats()
        self._fp_cache: dict[tuple[int, int], tuple] = {}

    # -- fingerprints of text regions (cached; positions determine them) --

    def text_fp_key(self, anchor: JNode, p: int, q: int) -> tuple:
        got = self._fp_cache.get((p, q))
        if got is None:
            got = fin_tree(self.reg, anchor, p, q).key
            if len(self._fp_cache) > 200000:
                self._fp_cache.clear()
            self._fp_cache[(p, q)] = got
        return got

    def _stored_fp_fwd(self, node, length: int) -> tuple:
        block = node.payload
        return self.text_fp_key(block, block.sbeg, block.sbeg + length)

    def _stored_fp_rev(self, node, length: int) -> tuple:
        block, plen = node.payload
        end = block.sbeg + plen
        return self.text_fp_key(block, end - length, end)

    # -- structural helpers ------------------------------------------------

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def lowest_covering_real(self, p: int, q: int) -> JNode:
        """Deepest actual tree node whose span contains [p, q]."""
        node = self.root
        while True:
            if node.kind == RUN:
                unit = node.children[0]
                if unit.sbeg <= p and q <= unit.send:
                    node = unit
                    continue
                return node
            hit = None
            for kid in node.children:
                if kid.sbeg <= p and q <= kid.send:
                    hit = kid
                    break
                if kid.sbeg > p:
                    break
            if hit is None:
                return node
            node = hit

    def search(self, pattern):
        from .search import search
        return search(self, pattern)


def register_pairs(index: Index, node: JNode) -> None:
    """Insert the trie keys and reporting points contributed by one block."""
    if node.kind == RUN:
        unit = node.children[0]
        ulen = unit.length
        x = index.t_fwd.insert(
            lambda lo, hi: fwd_reader(unit, lo, hi), ulen, unit)
        if _anchor_key(unit) < _anchor_key(x.payload):
            x.payload = unit
        plen = (node.run_count - 1) * ulen
        y = index.t_rev.insert(
            lambda lo, hi: rev_reader((node, plen), lo, hi), plen, (node, plen))
        if _anchor_key(node) < _anchor_key(y.payload[0]):
            y.payload = (node, plen)
        index.pairs.append(PairRec(x, y, node, plen, True))
        return
    kids = node.children
    for h in range(len(kids) - 1):
        nxt = kids[h + 1]
        x = index.t_fwd.insert(
            lambda lo, hi: fwd_reader(nxt, lo, hi), nxt.length, nxt)
        if _anchor_key(nxt) < _anchor_key(x.payload):
            x.payload = nxt
        plen = nxt.sbeg - node.sbeg
        y = index.t_rev.insert(
            lambda lo, hi: rev_reader((node, plen), lo, hi), plen, (node, plen))
        if _anchor_key(node) < _anchor_key(y.payload[0]):
            y.payload = (node, plen)
        index.pairs.append(PairRec(x, y, node, plen, False))


def register_group_sequence(index: Index, node: JNode) -> None:
    tid, _ = index.t_id.insert(
        lambda lo, hi: node.child_ids[lo:hi], len(node.child_ids), node)
    if tid.value is None:
        tid.value = node


def _canonical_trie_payloads(trie) -> None:
    """Give every internal node the payload of its smallest-unit leaf."""
    order = []
    stack = [trie.root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(node.kids.values())
    for node in reversed(order):
        if node.kids:
            unit = min(node.kids)
            node.payload = node.kids[unit].payload


def finalize_index(index: Index) -> Index:
    """In-order ranks, the static reporting structure, reversed links,
    marked-ancestor pointers and the per-letter leaf lists."""
    from .geom import StaticPairSet

    _canonical_trie_payloads(index.t_id)
    _canonical_trie_payloads(index.t_fwd.trie)
    _canonical_trie_payloads(index.t_rev.trie)
    index.t_fwd.trie.finalize_ranks()
    index.t_rev.trie.finalize_ranks()
    points = [(rec.x.rank, rec.y.rank, rec) for rec in index.pairs]
    index.rstruct = StaticPairSet(points)

    count = 0
    for node in index.nodes():
        count += 1
        node.copy_refs = None
        node.im_refs = None
    for node in index.nodes():
        if node.kind == LETTER:
            index.letter_leaves.setdefault(node.ident, []).append(node)
        elif node.kind == COPY:
            target = node.copy_link
            if target.copy_refs is None:
                target.copy_refs = []
            target.copy_refs.append(node)
        elif node.kind == INTERMEDIATE:
            target = node.im_link
            if target.im_refs is None:
                target.im_refs = []
            target.im_refs.append(node)
    # nearest marked ancestor-or-self, one top-down pass
    stack = [(index.root, None)]
    while stack:
        node, above = stack.pop()
        marked = (node.kind == RUN or node.copy_refs is not None
                  or node.im_refs is not None)
        node.marked_anc = node if marked else above
        for kid in node.children:
            stack.append((kid, node.marked_anc))
    index.node_count = count
    return index


def build_index_offline(s, deterministic: bool = False) -> Index:
    """Reference pipeline: full hierarchy, pruned tree, then the index."""
    from .blocks import build_hierarchy
    from .jiggly import set_ancestor_links

    hier = build_hierarchy(s)
    jt = build_jiggly(hier)
    index = Index(len(s), hier.reg, jt.root, deterministic)
    index.leftmost = dict(jt.leftmost)
    order = sorted((n for n in jt.nodes()), key=lambda n: (n.length, n.sbeg))
    for node in order:
        set_ancestor_links(node)
    for node in jt.nodes():
        if node.kind == GROUP:
            register_group_sequence(index, node)
            register_pairs(index, node)
        elif node.kind == RUN:
            register_pairs(index, node)
    index.stats.n = len(s)
    index.stats.nodes_created = jt.node_count
    index.stats.live_peak = jt.node_count
    return finalize_index(index)
