"""Bottom-up block hierarchy: run coalescing and cut-DCT grouping.

The hierarchy is built level by level.  Even-to-odd transitions coalesce
maximal runs of short equal-id blocks; odd-to-even transitions compute the
two-step deterministic-coin-tossing labels (id', id''), mark range
delimiters and unite each mark-delimited range into one block.

This module is the offline reference construction; the streaming builder
reproduces it block by block and is checked against it.
"""

from __future__ import annotations

# Letters live in [0, 2^32); generated identifiers start above that, so the
# two namespaces can never collide.  END_TOKEN is the end-of-stream letter
# fed by the streaming builder; it is never stored in a row.
LETTER_BOUND = 1 << 32
END_TOKEN = LETTER_BOUND
FIRST_GENERATED_ID = LETTER_BOUND + 1

# id'/id'' value meaning "undefined"; larger than any real vbit value.
INFTY = 1 << 62


def lbit(x: int, y: int) -> int:
    """Index of the lowest bit in which x and y differ (x != y)."""
    if x == y:
        raise ValueError("lbit requires distinct arguments")
    d = x ^ y
    return (d & -d).bit_length() - 1


def vbit(x: int, y: int) -> int:
    """2*lbit(x,y) + (bit lbit(x,y) of x); the DCT label of the pair."""
    i = lbit(x, y)
    return 2 * i + ((x >> i) & 1)


class IdRegistry:
    """Global identifier state shared by a text and its pattern overlays.

    Run identifiers encode (base id, repetition count) pairs through
    `pair`; group identifiers are dealt out by `fresh` (the sequence ->
    id map is kept by the caller: a dict offline, the id trie online).
    `creation[ident]` records the level on which the id was first minted.
    """

    __slots__ = ("next_id", "pair", "run_info", "creation", "deterministic")

    def __init__(self, deterministic: bool = False):
        self.next_id = FIRST_GENERATED_ID
        self.pair: dict[tuple[int, int], int] = {}
        self.run_info: dict[int, tuple[int, int, int]] = {}
        self.creation: dict[int, int] = {}
        self.deterministic = deterministic

    def fresh(self, level: int) -> int:
        ident = self.next_id
        self.next_id += 1
        self.creation[ident] = level
        return ident

    def run_id(self, base: int, count: int, unit_len: int, level: int) -> int:
        key = (base, count)
        ident = self.pair.get(key)
        if ident is None:
            ident = self.fresh(level)
            self.pair[key] = ident
            self.run_info[ident] = (base, count, unit_len)
        return ident

    def creation_level(self, ident: int) -> int:
        if ident < LETTER_BOUND:
            return 0
        return self.creation[ident]

    def unit_of(self, ident: int) -> tuple[int, int, int] | None:
        """(base id, count, unit length) when ident is a run id."""
        return self.run_info.get(ident)


class Row:
    """One level of the hierarchy: parallel arrays of block fields.

    parent[i] is filled in when the next row is produced; child_lo/child_hi
    give, for each block of this row, the covered index range in the row
    below (equal indices for copied blocks).
    """

    __slots__ = ("level", "ids", "begs", "lens", "parent",
                 "child_lo", "child_hi", "marks", "idpp", "bmark")

    def __init__(self, level: int):
        self.level = level
        self.ids: list[int] = []
        self.begs: list[int] = []
        self.lens: list[int] = []
        self.parent: list[int] = []
        self.child_lo: list[int] = []
        self.child_hi: list[int] = []
        self.marks: list[bool] | None = None
        self.idpp: list[int] | None = None
        self.bmark: list[bool] | None = None

    def __len__(self) -> int:
        return len(self.ids)


def coalesce_runs(row: Row, k: int, run_id) -> Row:
    """Level 2k -> 2k+1: replace maximal runs of short equal-id blocks.

    run_id(base, count, unit_len) resolves the identifier of a run block.
    """
    out = Row(row.level + 1)
    ids, begs, lens = row.ids, row.begs, row.lens
    limit = 1 << k
    n = len(ids)
    row.parent = [0] * n
    i = 0
    while i < n:
        j = i + 1
        if lens[i] <= limit:
            while j < n and ids[j] == ids[i]:
                j += 1
        r = j - i
        if r > 1:
            ident = run_id(ids[i], r, lens[i])
            length = r * lens[i]
        else:
            ident = ids[i]
            length = lens[i]
        idx = len(out.ids)
        out.ids.append(ident)
        out.begs.append(begs[i])
        out.lens.append(length)
        out.child_lo.append(i)
        out.child_hi.append(j - 1)
        for h in range(i, j):
            row.parent[h] = idx
        i = j
    return out


def compute_idp(ids, lens, k: int) -> list[int]:
    """id' labels: vbit of adjacent ids where both blocks are short."""
    limit = 1 << k
    out = [INFTY] * len(ids)
    for i in range(1, len(ids)):
        if lens[i] <= limit and lens[i - 1] <= limit:
            out[i] = vbit(ids[i - 1], ids[i])
    return out


def compute_idpp(ids, lens, k: int) -> list[int]:
    """id'' labels: a second vbit pass over id'."""
    idp = compute_idp(ids, lens, k)
    out = [INFTY] * len(ids)
    for i in range(1, len(ids)):
        if idp[i] != INFTY and idp[i - 1] != INFTY:
            out[i] = vbit(idp[i - 1], idp[i])
    return out


def is_mark(idpp, lens, i: int, k: int, last: int) -> bool:
    """Range-delimiter test for block i of an odd row (conditions (a)/(b))."""
    limit = 1 << k
    if lens[i] > limit or i == last or lens[i + 1] > limit:
        return True
    if i >= 2:
        a, b, c = idpp[i - 2], idpp[i - 1], idpp[i]
        return INFTY > a > b and b < c < INFTY
    return False


def compute_marks(row: Row, k: int) -> Row:
    """Attach id'' labels and mark flags to an odd row (in place)."""
    idpp = compute_idpp(row.ids, row.lens, k)
    last = len(row.ids) - 1
    row.idpp = idpp
    row.marks = [is_mark(idpp, row.lens, i, k, last) for i in range(len(row.ids))]
    return row


def group_marked(row: Row, k: int, group_id) -> Row:
    """Level 2k+1 -> 2k+2: unite each mark-delimited range into one block.

    group_id(key_tuple) resolves the identifier of a multi-block range.
    """
    assert row.marks is not None
    out = Row(row.level + 1)
    ids, begs, lens, marks = row.ids, row.begs, row.lens, row.marks
    n = len(ids)
    row.parent = [0] * n
    i = 0
    while i < n:
        j = i
        while not marks[j]:
            j += 1
        if i == j:
            ident = ids[i]
            length = lens[i]
        else:
            ident = group_id(tuple(ids[i:j + 1]))
            length = begs[j] + lens[j] - begs[i]
        idx = len(out.ids)
        out.ids.append(ident)
        out.begs.append(begs[i])
        out.lens.append(length)
        out.child_lo.append(i)
        out.child_hi.append(j)
        for h in range(i, j + 1):
            row.parent[h] = idx
        i = j + 1
    return out


# ---------------------------------------------------------------------------
# Incremental level-transition state machines.
#
# Identifier values feed back into the construction through vbit, so the
# order in which the counter deals out ids is structural.  The normative
# order is the left-to-right feeding order: letters are pumped in one at a
# time and each level closes runs/ranges as soon as their end is known.
# build_hierarchy below and the streaming index builder share these
# machines, which keeps the two constructions block-for-block identical.


class EvenState:
    """Run coalescing for one even level: at most one pending short block."""

    __slots__ = ("limit", "pid", "plen", "count")

    def __init__(self, k: int):
        self.limit = 1 << k
        self.pid = None
        self.plen = 0
        self.count = 0

    def push(self, ident: int, length: int) -> list[tuple]:
        """Events caused by a new block: absorb / flush / pass / queue."""
        ev = []
        if self.pid is not None:
            if ident == self.pid:
                self.count += 1
                return [("absorb",)]
            ev.append(("flush", self.count))
            self.pid = None
        if length > self.limit:
            ev.append(("pass",))
        else:
            self.pid = ident
            self.plen = length
            self.count = 1
            ev.append(("queue",))
        return ev

    def end(self) -> list[tuple]:
        if self.pid is None:
            return []
        ev = [("flush", self.count)]
        self.pid = None
        return ev


class OddState:
    """Cut-DCT labels and range delimiting for one odd level, incrementally.

    Keeps the rolling id'/id'' history of the last blocks; the history is
    global to the row and deliberately survives range closures.
    """

    __slots__ = ("limit", "prev_id", "prev_len", "prev_idp", "h2", "h1")

    def __init__(self, k: int):
        self.limit = 1 << k
        self.prev_id = None
        self.prev_len = 0
        self.prev_idp = INFTY
        self.h2 = INFTY
        self.h1 = INFTY

    def push(self, ident: int, length: int) -> str:
        """Action for a new block: queue / close_incl / pass_long."""
        if length > self.limit:
            self.prev_id = ident
            self.prev_len = length
            self.prev_idp = INFTY
            self.h2, self.h1 = self.h1, INFTY
            return "pass_long"
        if self.prev_id is None or self.prev_len > self.limit:
            idp = INFTY
        else:
            idp = vbit(self.prev_id, ident)
        if idp == INFTY or self.prev_idp == INFTY:
            idpp = INFTY
        else:
            idpp = vbit(self.prev_idp, idp)
        marked = INFTY > self.h2 > self.h1 and self.h1 < idpp < INFTY
        self.prev_id = ident
        self.prev_len = length
        self.prev_idp = idp
        self.h2, self.h1 = self.h1, idpp
        return "close_incl" if marked else "queue"


class Hierarchy:
    """Full offline hierarchy: rows from level 0 up to the one-block top."""

    __slots__ = ("s", "rows", "reg", "seq_dict", "_pos_index", "_window_cache")

    def __init__(self, s, rows, reg, seq_dict):
        self.s = s
        self.rows: list[Row] = rows
        self.reg: IdRegistry = reg
        self.seq_dict: dict[tuple[int, ...], int] = seq_dict
        self._pos_index: list[dict[int, int]] | None = None
        self._window_cache: dict = {}

    def index_of(self, level: int, sbeg: int) -> int:
        """Row index of the block starting at text position sbeg."""
        if self._pos_index is None:
            self._pos_index = [
                {b: i for i, b in enumerate(row.begs)} for row in self.rows
            ]
        return self._pos_index[level][sbeg]

    def k_of_level(self, level: int) -> int:
        """The k with level in {2k, 2k+1}."""
        return level // 2

    def boundaries(self, level: int) -> list[int]:
        """Sorted end positions of the blocks on one level."""
        row = self.rows[level]
        return [row.begs[i] + row.lens[i] - 1 for i in range(len(row))]


class _RowPump:
    """Feeds blocks upward level by level, recording every row."""

    def __init__(self, reg: IdRegistry, seq_dict):
        self.reg = reg
        self.seq_dict = seq_dict
        self.rows: list[Row] = []
        self.states: list = []
        self.pend_idx: list[int] = []    # even levels: row index of pending run start
        self.queues: list[list[int]] = []  # odd levels: row indices of open range

    def _ensure(self, level: int) -> None:
        while len(self.rows) <= level:
            lv = len(self.rows)
            self.rows.append(Row(lv))
            k = lv // 2
            self.states.append(EvenState(k) if lv % 2 == 0 else OddState(k))
            self.pend_idx.append(-1)
            self.queues.append([])

    def _append(self, level: int, ident: int, beg: int, length: int,
                clo: int, chi: int) -> int:
        row = self.rows[level]
        idx = len(row.ids)
        row.ids.append(ident)
        row.begs.append(beg)
        row.lens.append(length)
        if level > 0:
            row.child_lo.append(clo)
            row.child_hi.append(chi)
            src = self.rows[level - 1]
            src.parent.extend([idx] * (chi - clo + 1))
        return idx

    def feed(self, level: int, ident: int, beg: int, length: int,
             clo: int, chi: int) -> None:
        self._ensure(level)
        idx = self._append(level, ident, beg, length, clo, chi)
        row = self.rows[level]
        if level % 2 == 0:
            for ev in self.states[level].push(ident, length):
                if ev[0] == "flush":
                    self._flush_even(level, ev[1])
                elif ev[0] == "pass":
                    self.feed(level + 1, ident, beg, length, idx, idx)
                elif ev[0] == "queue":
                    self.pend_idx[level] = idx
        else:
            action = self.states[level].push(ident, length)
            if action == "queue":
                self.queues[level].append(idx)
            elif action == "close_incl":
                self.queues[level].append(idx)
                self._close_odd(level)
            else:  # pass_long
                if self.queues[level]:
                    self._close_odd(level)
                self.feed(level + 1, ident, beg, length, idx, idx)

    def _flush_even(self, level: int, count: int) -> None:
        pi = self.pend_idx[level]
        row = self.rows[level]
        ident, beg, ulen = row.ids[pi], row.begs[pi], row.lens[pi]
        if count == 1:
            self.feed(level + 1, ident, beg, ulen, pi, pi)
        else:
            rid = self.reg.run_id(ident, count, ulen, level + 1)
            self.feed(level + 1, rid, beg, count * ulen, pi, pi + count - 1)

    def _close_odd(self, level: int) -> None:
        q = self.queues[level]
        self.queues[level] = []
        row = self.rows[level]
        lo, hi = q[0], q[-1]
        if lo == hi:
            self.feed(level + 1, row.ids[lo], row.begs[lo], row.lens[lo], lo, lo)
            return
        key = tuple(row.ids[lo:hi + 1])
        ident = self.seq_dict.get(key)
        if ident is None:
            ident = self.reg.fresh(level + 1)
            self.seq_dict[key] = ident
        length = row.begs[hi] + row.lens[hi] - row.begs[lo]
        self.feed(level + 1, ident, row.begs[lo], length, lo, hi)

    def finish(self) -> list[Row]:
        level = 0
        while level < len(self.rows):
            if len(self.rows[level]) == 1:
                break
            if level % 2 == 0:
                for ev in self.states[level].end():
                    self._flush_even(level, ev[1])
            else:
                if self.queues[level]:
                    self._close_odd(level)
            level += 1
        # keep rows up to the first one-block row
        rows = self.rows
        for i, row in enumerate(rows):
            if len(row) == 1:
                rows = rows[:i + 1]
                break
        return rows


def build_hierarchy(s, reg: IdRegistry | None = None) -> Hierarchy:
    """Construct all rows for symbol sequence s (letters < LETTER_BOUND).

    Blocks are fed upward in text order and identifiers are minted the
    moment a run or range closes; this feeding order is normative (the
    streaming index builder reproduces it exactly).
    """
    if len(s) == 0:
        raise ValueError("empty input")
    if reg is None:
        reg = IdRegistry()
    seq_dict: dict[tuple[int, ...], int] = {}
    pump = _RowPump(reg, seq_dict)
    for p, c in enumerate(s):
        if not (0 <= c < LETTER_BOUND):
            raise ValueError(f"letter {c!r} outside the letter namespace")
        pump.feed(0, c, p, 1, 0, 0)
    rows = pump.finish()
    for level in range(1, len(rows), 2):
        if level + 1 < len(rows):
            compute_marks(rows[level], level // 2)
    return Hierarchy(s, rows, reg, seq_dict)
