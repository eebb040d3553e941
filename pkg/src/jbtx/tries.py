"""Compacted tries with implicit edge labels and a z-fast search layer.

Edges store only their lengths; label units are rematerialized on demand
from a payload anchored at each node (a tree block for letter keys, a
group block for id keys, a host-trie node for fingerprint keys).  The
z-fast layer finds a query locus with O(log m) fingerprint probes against
a handle trie and never trusts a probe without a final verification.
"""

from __future__ import annotations


def two_fattest(lo: int, hi: int) -> int:
    """The integer in [lo, hi] with the most trailing zeros (lo >= 1)."""
    t = hi.bit_length()
    while t >= 0:
        c = (hi >> t) << t
        if c >= lo:
            return c
        t -= 1
    raise ValueError("empty interval")


class TrieNode:
    __slots__ = ("parent", "depth", "kids", "payload", "value", "handle",
                 "tfnode", "rank", "rank_hi", "oitem", "omin", "omax",
                 "units")

    def __init__(self, parent, depth: int, payload):
        self.parent = parent
        self.depth = depth
        self.kids: dict = {}
        self.payload = payload
        self.value = None       # exact-key payload (set by callers)
        self.handle = 0
        self.tfnode = None      # handle-trie entry owning this node
        self.rank = -1
        self.rank_hi = -1
        self.oitem = None       # order-maintenance hooks (construction tries)
        self.omin = None
        self.omax = None
        self.units = None       # sorted child units (construction tries)


class CompactedTrie:
    """reader(payload, lo, hi) must return units lo..hi of a stored key
    that the payload anchors (any key passing through the node works)."""

    __slots__ = ("root", "reader", "size")

    def __init__(self, reader):
        self.root = TrieNode(None, 0, None)
        self.reader = reader
        self.size = 1

    def _label(self, node: TrieNode, lo: int, hi: int):
        return self.reader(node.payload, lo, hi)

    def insert(self, units_fn, key_len: int, payload):
        """Insert the key given by units_fn(lo, hi); returns (node, events).

        events: ("leaf", node) for a fresh leaf, ("split", mid, low) when an
        edge was cut, ("exact", node) when the key was already present.
        """
        node = self.root
        d = 0
        events = []
        while True:
            if d == key_len:
                events.append(("exact", node))
                return node, events
            unit = units_fn(d, d + 1)[0]
            child = node.kids.get(unit)
            if child is None:
                leaf = TrieNode(node, key_len, payload)
                node.kids[unit] = leaf
                self.size += 1
                events.append(("leaf", leaf, unit))
                return leaf, events
            llen = child.depth - node.depth
            lim = min(llen, key_len - d)
            lcp = 1
            while lcp < lim:
                step = min(lim - lcp, 64)
                lab = self._label(child, d + lcp, d + lcp + step)
                key = units_fn(d + lcp, d + lcp + step)
                if lab == key:
                    lcp += step
                    continue
                for a, b in zip(lab, key):
                    if a != b:
                        break
                    lcp += 1
                break
            if lcp == llen:
                node = child
                d += llen
                continue
            mid = TrieNode(node, node.depth + lcp, child.payload)
            node.kids[unit] = mid
            low_unit = self._label(child, d + lcp, d + lcp + 1)[0]
            mid.kids[low_unit] = child
            child.parent = mid
            self.size += 1
            events.append(("split", mid, child, low_unit))
            if d + lcp == key_len:
                events.append(("exact", mid))
                return mid, events
            leaf = TrieNode(mid, key_len, payload)
            leaf_unit = units_fn(d + lcp, d + lcp + 1)[0]
            mid.kids[leaf_unit] = leaf
            self.size += 1
            events.append(("leaf", leaf, leaf_unit))
            return leaf, events

    def descend(self, units):
        """Locus of the unit sequence: (node, exact) or None on mismatch.

        Every skipped label unit is rematerialized and compared, so a
        non-None result is fully verified.
        """
        node = self.root
        d = 0
        qlen = len(units)
        while d < qlen:
            child = node.kids.get(units[d])
            if child is None:
                return None
            stop = min(child.depth, qlen)
            if stop - d > 1:
                lab = self._label(child, d + 1, stop)
                if list(lab) != list(units[d + 1:stop]):
                    return None
            d = stop
            node = child
        return node, node.depth == qlen

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.kids.values())

    def finalize_ranks(self) -> int:
        """Preorder ranks with children in unit order; returns node count."""
        counter = 0
        stack = [self.root]
        order = []
        while stack:
            node = stack.pop()
            node.rank = counter
            counter += 1
            order.append(node)
            for unit in sorted(node.kids, reverse=True):
                stack.append(node.kids[unit])
        for node in reversed(order):
            hi = node.rank
            for kid in node.kids.values():
                hi = max(hi, kid.rank_hi)
            node.rank_hi = hi
        return counter


class ZFastTrie:
    """A compacted trie whose loci are found by fingerprint probes.

    stored_fp(node, length) must return the fingerprint key of the first
    `length` units of any key anchored at the node's payload.
    """

    __slots__ = ("trie", "handles", "stored_fp")

    def __init__(self, reader, stored_fp):
        self.trie = CompactedTrie(reader)
        self.stored_fp = stored_fp

        def handle_reader(payload, lo, hi):
            tnode, hlen = payload
            return stored_fp(tnode, hlen)[lo:hi]

        self.handles = CompactedTrie(handle_reader)

    def _set_handle(self, node: TrieNode) -> None:
        hlen = two_fattest(node.parent.depth + 1, node.depth)
        node.handle = hlen
        key = self.stored_fp(node, hlen)
        tf, _ = self.handles.insert(lambda lo, hi: key[lo:hi], len(key),
                                    (node, hlen))
        tf.value = node
        node.tfnode = tf

    def insert(self, units_fn, key_len: int, payload) -> TrieNode:
        node, events = self.trie.insert(units_fn, key_len, payload)
        for ev in events:
            if ev[0] == "leaf":
                self._set_handle(ev[1])
            elif ev[0] == "split":
                mid, low = ev[1], ev[2]
                old = low.handle
                if old <= mid.depth:
                    # the old handle now belongs to the upper half
                    mid.handle = old
                    mid.tfnode = low.tfnode
                    mid.tfnode.value = mid
                    low.tfnode = None
                    self._set_handle(low)
                else:
                    self._set_handle(mid)
        return node

    def locate(self, qlen: int, fp_prefix, unit_at, query_fp=None):
        """Locus whose subtree holds exactly the stored keys with the query
        as a prefix, or None.  fp_prefix(f) gives the fingerprint key of the
        query's first f units; unit_at(i) its i-th unit; query_fp the key of
        the whole query (defaults to fp_prefix(qlen))."""
        trie = self.trie
        if qlen == 0:
            return trie.root
        lo, hi = 0, qlen
        best = trie.root
        candidate = None
        while lo < hi:
            f = two_fattest(lo + 1, hi)
            got = self.handles.descend(fp_prefix(f))
            node = None
            if got is not None and got[1]:
                node = got[0].value
            if node is None:
                hi = f - 1
            elif node.depth >= qlen:
                candidate = node
                break
            else:
                best = node
                lo = node.depth
        if candidate is None:
            candidate = best.kids.get(unit_at(lo))
            if candidate is None:
                return None
        if not (candidate.parent.depth < qlen <= candidate.depth):
            return None
        want = query_fp if query_fp is not None else fp_prefix(qlen)
        if tuple(want) != tuple(self.stored_fp(candidate, qlen)):
            return None
        return candidate

    def plain_locate(self, units):
        """Label-walking reference for locate (same contract)."""
        got = self.trie.descend(units)
        return None if got is None else got[0]

    def rebuild_handles(self) -> None:
        """Recreate the handle trie from scratch (after deserialization)."""
        def handle_reader(payload, lo, hi):
            tnode, hlen = payload
            return self.stored_fp(tnode, hlen)[lo:hi]

        self.handles = CompactedTrie(handle_reader)
        for node in self.trie.nodes():
            if node is not self.trie.root:
                self._set_handle(node)
