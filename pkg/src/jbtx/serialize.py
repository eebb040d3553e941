"""Index persistence: canonical byte format with a checksum trailer.

The serialization is canonical: node order, id numbering and section
order are functions of the index content alone, so two builds of the same
text (streaming or offline) produce byte-identical files.  Derived state
(ranks, reporting structure, reversed links, handle tries, ancestor
tables) is rebuilt on load.
"""

from __future__ import annotations

import hashlib
import io

from .blocks import FIRST_GENERATED_ID, IdRegistry, LETTER_BOUND
from .index import Index, PairRec, finalize_index
from .jiggly import (COPY, GROUP, INTERMEDIATE, LETTER, RUN, JNode,
                     set_ancestor_links)

MAGIC = b"JBTX"
VERSION = 1


class IndexFormatError(ValueError):
    pass


def write_varint(out: bytearray, x: int) -> None:
    if x < 0:
        raise ValueError("negative varint")
    while True:
        b = x & 0x7F
        x >>= 7
        if x:
            out.append(b | 0x80)
        else:
            out.append(b)
            return


class _Reader:
    __slots__ = ("buf", "pos")

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def varint(self) -> int:
        x = 0
        shift = 0
        while True:
            if self.pos >= len(self.buf):
                raise IndexFormatError("truncated varint")
            b = self.buf[self.pos]
            self.pos += 1
            x |= (b & 0x7F) << shift
            if not b & 0x80:
                return x
            shift += 7

    def byte(self) -> int:
        if self.pos >= len(self.buf):
            raise IndexFormatError("truncated byte")
        b = self.buf[self.pos]
        self.pos += 1
        return b


def _ident_code(ident) -> tuple[int, int]:
    if ident is None:
        return (2, 0)
    if ident < LETTER_BOUND:
        return (0, ident)
    return (1, ident - FIRST_GENERATED_ID)


def _node_sort_key(node: JNode):
    return (node.sbeg, -node.send, node.kind, node.level)


def _trie_dump(out: bytearray, trie, jidx, unit_enc, payload_enc) -> dict:
    """Preorder dump with unit-sorted children; returns node -> index."""
    order = {}
    stack = [trie.root]
    flat = []
    while stack:
        node = stack.pop()
        order[node] = len(flat)
        flat.append(node)
        for unit in sorted(node.kids, reverse=True):
            stack.append(node.kids[unit])
    write_varint(out, len(flat))
    for node in flat:
        write_varint(out, node.depth)
        payload_enc(out, node)
        if node.value is not None:
            out.append(1)
            write_varint(out, jidx[node.value])
        else:
            out.append(0)
        write_varint(out, len(node.kids))
        for unit in sorted(node.kids):
            unit_enc(out, unit)
            write_varint(out, order[node.kids[unit]])
    return order


def save_bytes(index: Index) -> bytes:
    out = bytearray()
    out += MAGIC
    out.append(VERSION)
    out.append(1 if index.deterministic else 0)
    write_varint(out, index.n)
    write_varint(out, LETTER_BOUND.bit_length() - 1)   # letter namespace bits
    write_varint(out, len(index.pairs))

    nodes = sorted(index.nodes(), key=_node_sort_key)
    jidx = {}
    for i, node in enumerate(nodes):
        if i and _node_sort_key(nodes[i - 1]) == _node_sort_key(node):
            raise AssertionError("node sort key collision")
        jidx[node] = i
    write_varint(out, len(nodes))
    for node in nodes:
        write_varint(out, node.sbeg)
        write_varint(out, node.send)
        out.append(node.kind)
        write_varint(out, node.level)
        tag, val = _ident_code(node.ident)
        out.append(tag)
        write_varint(out, val)
        if node.kind == RUN:
            write_varint(out, node.run_count)
        if node.kind == COPY:
            write_varint(out, jidx[node.copy_link])
        if node.kind == INTERMEDIATE:
            write_varint(out, jidx[node.im_link])
            write_varint(out, node.im_off)
            write_varint(out, node.im_r)
            write_varint(out, node.ref_off)
        write_varint(out, len(node.children))
        for kid in node.children:
            write_varint(out, jidx[kid])

    # run-pair registry
    pairs = sorted(index.reg.pair.items())
    write_varint(out, len(pairs))
    for (base, count), ident in pairs:
        tag, val = _ident_code(base)
        out.append(tag)
        write_varint(out, val)
        write_varint(out, count)
        write_varint(out, ident - FIRST_GENERATED_ID)

    def id_unit_enc(buf, unit):
        tag, val = _ident_code(unit)
        buf.append(tag)
        write_varint(buf, val)

    def letter_unit_enc(buf, unit):
        write_varint(buf, unit)

    def node_payload_enc(buf, tnode):
        write_varint(buf, 0 if tnode.payload is None else jidx[tnode.payload] + 1)

    def rev_payload_enc(buf, tnode):
        if tnode.payload is None:
            write_varint(buf, 0)
        else:
            block, plen = tnode.payload
            write_varint(buf, jidx[block] + 1)
            write_varint(buf, plen)

    _trie_dump(out, index.t_id, jidx, id_unit_enc, node_payload_enc)
    fwd_order = _trie_dump(out, index.t_fwd.trie, jidx, letter_unit_enc,
                           node_payload_enc)
    rev_order = _trie_dump(out, index.t_rev.trie, jidx, letter_unit_enc,
                           rev_payload_enc)

    recs = sorted(index.pairs,
                  key=lambda r: (fwd_order[r.x], rev_order[r.y],
                                 jidx[r.anchor], r.bound_off))
    write_varint(out, len(recs))
    for rec in recs:
        write_varint(out, fwd_order[rec.x])
        write_varint(out, rev_order[rec.y])
        write_varint(out, jidx[rec.anchor])
        write_varint(out, rec.bound_off)
        out.append(1 if rec.is_run else 0)

    out += hashlib.sha256(bytes(out)).digest()
    return bytes(out)


canonical_bytes = save_bytes


def save_index(index: Index, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(save_bytes(index))


def _trie_load(rd: _Reader, trie, nodes, unit_dec, payload_dec) -> list:
    count = rd.varint()
    flat = [trie.root]
    depths = [rd.varint()]
    payload_dec(rd, trie.root, nodes)
    if rd.byte():
        trie.root.value = nodes[rd.varint()]
    kid_specs = [[(unit_dec(rd), rd.varint()) for _ in range(rd.varint())]]
    from .tries import TrieNode
    for _ in range(count - 1):
        node = TrieNode(None, rd.varint(), None)
        payload_dec(rd, node, nodes)
        if rd.byte():
            node.value = nodes[rd.varint()]
        kid_specs.append([(unit_dec(rd), rd.varint())
                          for _ in range(rd.varint())])
        flat.append(node)
    for i, specs in enumerate(kid_specs):
        for unit, idx in specs:
            flat[i].kids[unit] = flat[idx]
            flat[idx].parent = flat[i]
    trie.size = count
    return flat


def load_bytes(data: bytes) -> Index:
    if len(data) < 4 + 2 + 32 or data[:4] != MAGIC:
        raise IndexFormatError("not an index file")
    body, digest = data[:-32], data[-32:]
    if hashlib.sha256(body).digest() != digest:
        raise IndexFormatError("checksum mismatch")
    rd = _Reader(body)
    rd.pos = 4
    version = rd.byte()
    if version != VERSION:
        raise IndexFormatError(f"unsupported version {version}")
    deterministic = bool(rd.byte())
    n = rd.varint()
    letter_bits = rd.varint()
    if letter_bits != LETTER_BOUND.bit_length() - 1:
        raise IndexFormatError(f"letter namespace width {letter_bits}")
    pair_total = rd.varint()

    count = rd.varint()
    nodes: list[JNode] = []
    kid_lists: list[list[int]] = []
    links: list[tuple] = []
    max_gen = FIRST_GENERATED_ID - 1
    for _ in range(count):
        sbeg = rd.varint()
        send = rd.varint()
        kind = rd.byte()
        level = rd.varint()
        tag = rd.byte()
        val = rd.varint()
        ident = None if tag == 2 else (val if tag == 0 else
                                       val + FIRST_GENERATED_ID)
        if ident is not None and ident >= FIRST_GENERATED_ID:
            max_gen = max(max_gen, ident)
        node = JNode(sbeg, send, ident, level, kind)
        extra = ()
        if kind == RUN:
            node.run_count = rd.varint()
        if kind == COPY:
            extra = (rd.varint(),)
        if kind == INTERMEDIATE:
            extra = (rd.varint(), rd.varint(), rd.varint(), rd.varint())
        kid_lists.append([rd.varint() for _ in range(rd.varint())])
        links.append(extra)
        nodes.append(node)
    for node, kids, extra in zip(nodes, kid_lists, links):
        node.children = [nodes[i] for i in kids]
        for kid in node.children:
            kid.parent = node
        if node.kind == COPY:
            node.copy_link = nodes[extra[0]]
        elif node.kind == INTERMEDIATE:
            node.im_link = nodes[extra[0]]
            node.im_off = extra[1]
            node.im_r = extra[2]
            node.ref_off = extra[3]

    reg = IdRegistry(deterministic)
    pair_count = rd.varint()
    pair_items = []
    for _ in range(pair_count):
        tag = rd.byte()
        val = rd.varint()
        base = val if tag == 0 else val + FIRST_GENERATED_ID
        cnt = rd.varint()
        ident = rd.varint() + FIRST_GENERATED_ID
        pair_items.append((base, cnt, ident))
        max_gen = max(max_gen, ident)
    reg.next_id = max_gen + 1

    roots = [node for node in nodes if node.parent is None]
    if len(roots) != 1:
        raise IndexFormatError("malformed tree")
    index = Index(n, reg, roots[0], deterministic)

    def id_unit_dec(r):
        tag = r.byte()
        val = r.varint()
        return val if tag == 0 else (val + FIRST_GENERATED_ID if tag == 1
                                     else None)

    def letter_unit_dec(r):
        return r.varint()

    def node_payload_dec(r, tnode, jnodes):
        ref = r.varint()
        tnode.payload = None if ref == 0 else jnodes[ref - 1]

    def rev_payload_dec(r, tnode, jnodes):
        ref = r.varint()
        if ref == 0:
            tnode.payload = None
        else:
            tnode.payload = (jnodes[ref - 1], r.varint())

    _trie_load(rd, index.t_id, nodes, id_unit_dec, node_payload_dec)
    fwd_flat = _trie_load(rd, index.t_fwd.trie, nodes, letter_unit_dec,
                          node_payload_dec)
    rev_flat = _trie_load(rd, index.t_rev.trie, nodes, letter_unit_dec,
                          rev_payload_dec)

    rec_count = rd.varint()
    if rec_count != pair_total:
        raise IndexFormatError("pair count mismatch")
    for _ in range(rec_count):
        x = fwd_flat[rd.varint()]
        y = rev_flat[rd.varint()]
        anchor = nodes[rd.varint()]
        bound_off = rd.varint()
        is_run = bool(rd.byte())
        index.pairs.append(PairRec(x, y, anchor, bound_off, is_run))
    if rd.pos != len(body):
        raise IndexFormatError("trailing bytes")

    _rebuild_derived(index, nodes, pair_items)
    return index


def _rebuild_derived(index: Index, nodes: list[JNode], pair_items) -> None:
    reg = index.reg
    for node in nodes:
        if node.ident is not None and node.ident >= FIRST_GENERATED_ID:
            reg.creation[node.ident] = node.level

    def child_ids(node: JNode):
        if node.child_ids is not None:
            return node.child_ids
        out = []
        for kid in node.children:
            if kid.kind != INTERMEDIATE:
                out.append(kid.ident)
            else:
                target = kid.im_link
                if target.kind == COPY:
                    target = target.copy_link
                out.extend(child_ids(target)[kid.im_off:kid.im_off + kid.im_r])
        node.child_ids = tuple(out)
        return node.child_ids

    for node in nodes:
        if node.kind == GROUP:
            child_ids(node)
        if node.kind in (LETTER, RUN, GROUP):
            prev = index.leftmost.get(node.ident)
            if prev is None or node.sbeg < prev.sbeg:
                index.leftmost[node.ident] = node

    for (base, cnt, ident) in pair_items:
        reg.pair[(base, cnt)] = ident
        reg.run_info[ident] = (base, cnt, index.leftmost[base].length)

    leftmost = index.leftmost
    for node in nodes:
        if node.length <= 1:
            continue
        if node.kind == RUN:
            base = node.children[0].ident
            node.al = node.ar = leftmost[base]
        elif node.kind == GROUP:
            node.al = leftmost[node.child_ids[0]]
            node.ar = leftmost[node.child_ids[-1]]
        elif node.kind == COPY:
            target = node.copy_link
            if target.kind == RUN:
                base = target.children[0].ident
                node.al = node.ar = leftmost[base]
            else:
                node.al = leftmost[target.child_ids[0]]
                node.ar = leftmost[target.child_ids[-1]]
        elif node.kind == INTERMEDIATE:
            target = node.im_link
            if target.kind == COPY:
                target = target.copy_link
            ids = target.child_ids[node.im_off:node.im_off + node.im_r]
            node.al = leftmost[ids[0]]
            node.ar = leftmost[ids[-1]]
    for node in sorted(nodes, key=lambda x: (x.length, x.sbeg)):
        set_ancestor_links(node)

    finalize_index(index)
    index.t_fwd.rebuild_handles()
    index.t_rev.rebuild_handles()
    index.stats.n = index.n
    index.stats.nodes_created = len(nodes)
    index.stats.live_peak = len(nodes)


def load_index(path: str) -> Index:
    with open(path, "rb") as fh:
        return load_bytes(fh.read())
