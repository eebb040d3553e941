"""One-pass streaming construction of the index.

Letters are pumped through the same per-level state machines as the
reference row construction; every run/range closure immediately builds the
corresponding tree node and updates the shared search structures.  Ranges
whose id sequence was seen before collapse to childless copies on the
spot, and new ranges are greedily parsed into subranges against two online
tries and a dynamic point set, which replaces repeated subranges by
intermediate back-links without ever looking at the text again.
"""

from __future__ import annotations

import time

from .blocks import LETTER_BOUND, EvenState, OddState, IdRegistry
from .geom import DynamicPointSet, OrderList
from .index import (Index, finalize_index, register_group_sequence,
                    register_pairs)
from .jiggly import (COPY, GROUP, INTERMEDIATE, LETTER, RUN, STOP, WALL,
                     JNode, set_ancestor_links)
from .tries import CompactedTrie


def _online_fwd_reader(payload, lo, hi):
    group, off, klen, final = payload
    ids = group.child_ids
    out = []
    for i in range(lo, hi):
        out.append(STOP if final and i == klen - 1 else ids[off + i])
    return out


def _online_rev_reader(payload, lo, hi):
    group, off = payload
    ids = group.child_ids
    return [WALL if i == off else ids[off - 1 - i] for i in range(lo, hi)]


class _Level:
    __slots__ = ("state", "pending", "queue", "received", "first")

    def __init__(self, level: int):
        k = level // 2
        self.state = EvenState(k) if level % 2 == 0 else OddState(k)
        self.pending: JNode | None = None
        self.queue: list[JNode] = []
        self.received = 0
        self.first: JNode | None = None


class StreamBuilder:
    def __init__(self, deterministic: bool = False):
        reg = IdRegistry(deterministic)
        self.index = Index(0, reg, None, deterministic)
        self.reg = reg
        self.levels: list[_Level] = []
        self.n = 0
        self.finished = False
        self._t0 = time.perf_counter()
        # online subrange-parsing state (discarded at finish)
        self.t_o = CompactedTrie(_online_fwd_reader)
        self.t_or = CompactedTrie(_online_rev_reader)
        self.xorder = OrderList()
        self.yorder = OrderList()
        for trie, ol in ((self.t_o, self.xorder), (self.t_or, self.yorder)):
            item = ol.insert_after(ol.head)
            trie.root.oitem = item
            trie.root.omin = item
            trie.root.omax = item
        self.points = DynamicPointSet()

    # -- node bookkeeping ---------------------------------------------------

    def _node(self, sbeg, send, ident, level, kind) -> JNode:
        node = JNode(sbeg, send, ident, level, kind)
        st = self.index.stats
        st.nodes_created += 1
        if st.live > st.live_peak:
            st.live_peak = st.live
        return node

    def _discard(self, node: JNode) -> None:
        st = self.index.stats
        stack = [node]
        while stack:
            cur = stack.pop()
            st.nodes_discarded += 1
            stack.extend(cur.children)

    def _links(self, node: JNode, first_id: int, last_id: int) -> None:
        node.al = self.index.leftmost[first_id]
        node.ar = self.index.leftmost[last_id]
        set_ancestor_links(node)

    # -- feeding ------------------------------------------------------------

    def feed_letter(self, c: int) -> None:
        if self.finished:
            raise RuntimeError("builder already finished")
        if not 0 <= c < LETTER_BOUND:
            raise ValueError(f"letter {c!r} outside the letter namespace")
        node = self._node(self.n, self.n, c, 0, LETTER)
        self.index.leftmost.setdefault(c, node)
        self.n += 1
        self._feed(0, node)

    def extend(self, symbols) -> None:
        for c in symbols:
            self.feed_letter(c)

    def _ensure(self, level: int) -> _Level:
        while len(self.levels) <= level:
            self.levels.append(_Level(len(self.levels)))
        return self.levels[level]

    def _feed(self, level: int, node: JNode) -> None:
        lv = self._ensure(level)
        lv.received += 1
        if lv.first is None:
            lv.first = node
        if level % 2 == 0:
            for ev in lv.state.push(node.ident, node.length):
                if ev[0] == "absorb":
                    self._discard(node)
                elif ev[0] == "flush":
                    self._flush_even(level, ev[1])
                elif ev[0] == "pass":
                    self._feed(level + 1, node)
                else:
                    lv.pending = node
        else:
            action = lv.state.push(node.ident, node.length)
            if action == "queue":
                lv.queue.append(node)
            elif action == "close_incl":
                lv.queue.append(node)
                self._close_odd(level)
            else:
                if lv.queue:
                    self._close_odd(level)
                self._feed(level + 1, node)

    def _flush_even(self, level: int, count: int) -> None:
        lv = self.levels[level]
        u = lv.pending
        lv.pending = None
        if count == 1:
            self._feed(level + 1, u)
            return
        rid = self.reg.run_id(u.ident, count, u.length, level + 1)
        send = u.sbeg + count * u.length - 1
        existing = self.index.leftmost.get(rid)
        if existing is not None:
            node = self._node(u.sbeg, send, rid, existing.level, COPY)
            node.copy_link = existing
            self._links(node, u.ident, u.ident)
            self._discard(u)
        else:
            node = self._node(u.sbeg, send, rid, level + 1, RUN)
            node.run_count = count
            node.children = [u]
            u.parent = node
            self.index.leftmost[rid] = node
            self._links(node, u.ident, u.ident)
            register_pairs(self.index, node)
        self._feed(level + 1, node)

    def _close_odd(self, level: int) -> None:
        lv = self.levels[level]
        q = lv.queue
        lv.queue = []
        if len(q) == 1:
            self._feed(level + 1, q[0])
            return
        seq = tuple(n.ident for n in q)
        got = self.index.t_id.descend(seq)
        if got is not None and got[1] and got[0].value is not None:
            target = got[0].value
            node = self._node(q[0].sbeg, q[-1].send, target.ident,
                              target.level, COPY)
            node.copy_link = target
            self._links(node, seq[0], seq[-1])
            for x in q:
                self._discard(x)
            self._feed(level + 1, node)
            return
        gid = self.reg.fresh(level + 1)
        node = self._node(q[0].sbeg, q[-1].send, gid, level + 1, GROUP)
        node.child_ids = seq
        self.index.leftmost[gid] = node
        register_group_sequence(self.index, node)
        self._links(node, seq[0], seq[-1])
        pieces = self._parse_online(q, seq)
        kids: list[JNode] = []
        for (o, r, info) in pieces:
            if r == 1:
                kid = q[o]
            else:
                first, last = q[o], q[o + r - 1]
                kid = self._node(first.sbeg, last.send, None, level,
                                 INTERMEDIATE)
                tpos, target, toff = info
                if target is None:
                    target = node
                kid.im_link = target
                kid.im_off = toff
                kid.im_r = r
                kid.ref_off = tpos - target.sbeg
                self._links(kid, seq[o], seq[o + r - 1])
                for x in q[o:o + r]:
                    self._discard(x)
            kid.parent = node
            kids.append(kid)
        node.children = kids
        register_pairs(self.index, node)
        self._insert_parse_keys(node, q, seq, pieces)
        self._feed(level + 1, node)

    # -- online greedy subrange parsing --------------------------------------

    def _parse_online(self, q: list[JNode], seq: tuple):
        g = len(seq)
        begs = [n.sbeg for n in q]

        def rl(x: int, l: int):
            h = min(l, x)
            part = seq[x - h:x]
            return part if h == l else (WALL,) + part

        def rr(x: int, l: int):
            return seq[x:x + min(l, g - x)]

        def feasible(m: int, big: int) -> bool:
            if m + big > g:
                return False
            wl, wr = rl(m, 4 * big), rr(m, 5 * big)
            for mp in range(m):
                if rl(mp, 4 * big) == wl and rr(mp, 5 * big) == wr:
                    return True
            rho = min(5 * big, g - m)
            right_clipped = 5 * big > g - m
            left_clipped = 4 * big > m
            wall_lo = max(0, m - 4 * big)
            for h in range(g):
                if h <= m - 4 * big:
                    zread = list(seq[h:m + rho]) + ([STOP] if right_clipped else [])
                    if self.t_o.descend(zread) is not None:
                        return True
                elif h >= m + rho:
                    if right_clipped:
                        continue
                    vread = list(seq[wall_lo:h])[::-1] + \
                        ([WALL] if left_clipped else [])
                    if self.t_or.descend(vread) is not None:
                        return True
                else:
                    zread = list(seq[h:m + rho]) + ([STOP] if right_clipped else [])
                    zed = self.t_o.descend(zread)
                    if zed is None:
                        continue
                    vread = list(seq[wall_lo:h])[::-1] + \
                        ([WALL] if left_clipped else [])
                    ved = self.t_or.descend(vread)
                    if ved is None:
                        continue
                    zn, vn = zed[0], ved[0]
                    if self.points.any_in(zn.omin, zn.omax, vn.omin, vn.omax):
                        return True
            return False

        def smallest_match(m: int, r: int):
            best = None
            want = seq[m:m + r]
            for mp in range(m):
                if mp + r <= g and seq[mp:mp + r] == want:
                    best = (begs[mp], None, mp)
                    break
            for h in range(m, m + r):
                zed = self.t_o.descend(list(seq[h:m + r]))
                if zed is None:
                    continue
                ved = self.t_or.descend(list(seq[m:h])[::-1])
                if ved is None:
                    continue
                zn, vn = zed[0], ved[0]
                pay = self.points.min_payload(zn.omin, zn.omax,
                                              vn.omin, vn.omax)
                if pay is not None:
                    tpos, group, off = pay
                    cand = (tpos - (begs[h] - begs[m]), group, off - (h - m))
                    if best is None or cand[0] < best[0]:
                        best = cand
            return best

        pieces = []
        m = 0
        while m < g:
            r = 1
            while feasible(m, r + 1):
                r += 1
            if r > 1:
                info = smallest_match(m, r)
                assert info is not None
                pieces.append((m, r, info))
            else:
                pieces.append((m, 1, None))
            m += r
        return pieces

    def _insert_parse_keys(self, node: JNode, q, seq, pieces) -> None:
        g = len(seq)
        for (o, r, _) in pieces:
            final = (o + r == g)
            klen = r + (1 if final else 0)
            pay = (node, o, klen, final)

            def funits(lo, hi, o=o, klen=klen, final=final):
                return [STOP if final and i == klen - 1 else seq[o + i]
                        for i in range(lo, hi)]

            xn, ev = self.t_o.insert(funits, klen, pay)
            self._order_hook(self.t_o, self.xorder, ev)

            def runits(lo, hi, o=o):
                return [WALL if i == o else seq[o - 1 - i]
                        for i in range(lo, hi)]

            yn, ev = self.t_or.insert(runits, o + 1, (node, o))
            self._order_hook(self.t_or, self.yorder, ev)
            self.points.insert(xn.oitem, yn.oitem, (q[o].sbeg, node, o))
            self.index.stats.point_count += 1

    def _order_hook(self, trie, ol: OrderList, events) -> None:
        from bisect import bisect_left
        for ev in events:
            if ev[0] == "split":
                mid, low, low_unit = ev[1], ev[2], ev[3]
                # mid slots into low's place; sibling lists are unchanged
                mid.units = [low_unit]
                item = ol.insert_before(low.omin)
                mid.oitem = item
                mid.omin = item
                mid.omax = low.omax
                self._bubble(mid.parent, item)
            elif ev[0] == "leaf":
                leaf, unit = ev[1], ev[2]
                parent = leaf.parent
                if parent.units is None:
                    parent.units = sorted(parent.kids)
                    pos = bisect_left(parent.units, unit)
                else:
                    pos = bisect_left(parent.units, unit)
                    parent.units.insert(pos, unit)
                if pos == 0:
                    anchor = parent.oitem
                else:
                    anchor = parent.kids[parent.units[pos - 1]].omax
                item = ol.insert_after(anchor)
                leaf.oitem = item
                leaf.omin = item
                leaf.omax = item
                self._bubble(parent, item)

    @staticmethod
    def _bubble(node, item) -> None:
        while node is not None:
            changed = False
            if item.tag < node.omin.tag:
                node.omin = item
                changed = True
            if item.tag > node.omax.tag:
                node.omax = item
                changed = True
            if not changed:
                break
            node = node.parent

    # -- finalization ---------------------------------------------------------

    def finish(self) -> Index:
        if self.finished:
            raise RuntimeError("builder already finished")
        if self.n == 0:
            raise ValueError("empty stream")
        self.finished = True
        root = None
        level = 0
        while level < len(self.levels):
            lv = self.levels[level]
            if lv.received == 1:
                root = lv.first
                break
            if level % 2 == 0:
                for ev in lv.state.end():
                    self._flush_even(level, ev[1])
            else:
                if lv.queue:
                    self._close_odd(level)
            level += 1
        assert root is not None
        index = self.index
        index.root = root
        index.n = self.n
        index.stats.n = self.n
        index.stats.relabels = self.xorder.relabels + self.yorder.relabels
        index.stats.wall_time = time.perf_counter() - self._t0
        # construction-only state is dropped before finalization
        self.t_o = self.t_or = None
        self.xorder = self.yorder = None
        self.points = None
        self.levels = []
        return finalize_index(index)


def build_index(symbols, deterministic: bool = False) -> Index:
    """Stream all symbols through a builder and finalize."""
    b = StreamBuilder(deterministic)
    b.extend(symbols)
    return b.finish()


def build_index_offline(s, deterministic: bool = False) -> Index:
    from .index import build_index_offline as _off
    return _off(s, deterministic)
