"""Geometric helpers: static pair reporting, order maintenance, and a
dynamic point set with range reporting and range-min over payloads."""

from __future__ import annotations

from bisect import bisect_left, bisect_right


class StaticPairSet:
    """Merge tree over (x, y, payload) triples with integer coordinates;
    reports exactly the payloads inside a closed rectangle."""

    __slots__ = ("n", "size", "xs", "ylists", "plists")

    def __init__(self, points):
        pts = sorted(points, key=lambda t: (t[0], t[1]))
        self.n = len(pts)
        size = 1
        while size < max(1, self.n):
            size <<= 1
        self.size = size
        self.xs = [p[0] for p in pts]
        self.ylists: list = [[] for _ in range(2 * size)]
        self.plists: list = [[] for _ in range(2 * size)]
        for i, (x, y, pay) in enumerate(pts):
            self.ylists[size + i] = [y]
            self.plists[size + i] = [pay]
        for v in range(size - 1, 0, -1):
            ly, lp = self.ylists[2 * v], self.plists[2 * v]
            ry, rp = self.ylists[2 * v + 1], self.plists[2 * v + 1]
            my, mp = [], []
            i = j = 0
            while i < len(ly) or j < len(ry):
                if j >= len(ry) or (i < len(ly) and ly[i] <= ry[j]):
                    my.append(ly[i])
                    mp.append(lp[i])
                    i += 1
                else:
                    my.append(ry[j])
                    mp.append(rp[j])
                    j += 1
            self.ylists[v] = my
            self.plists[v] = mp

    def report(self, xlo: int, xhi: int, ylo: int, yhi: int) -> list:
        """Payloads of all points with xlo <= x <= xhi and ylo <= y <= yhi."""
        out = []
        if self.n == 0 or xlo > xhi or ylo > yhi:
            return out
        l = bisect_left(self.xs, xlo) + self.size
        r = bisect_right(self.xs, xhi) + self.size
        while l < r:
            if l & 1:
                self._emit(l, ylo, yhi, out)
                l += 1
            if r & 1:
                r -= 1
                self._emit(r, ylo, yhi, out)
            l >>= 1
            r >>= 1
        return out

    def _emit(self, v, ylo, yhi, out):
        ys = self.ylists[v]
        a = bisect_left(ys, ylo)
        b = bisect_right(ys, yhi)
        if a < b:
            out.extend(self.plists[v][a:b])


# ---------------------------------------------------------------------------


class OItem:
    __slots__ = ("tag", "prev", "next")

    def __init__(self, tag: int):
        self.tag = tag
        self.prev = None
        self.next = None

    def __lt__(self, other):         # order within the owning list only
        return self.tag < other.tag

    def __le__(self, other):
        return self.tag <= other.tag


class OrderList:
    """Dynamic ordered list with integer tags; relabels a doubling aligned
    window around the insertion point when the local tag space runs out."""

    STRIDE = 1 << 20
    SPACE = 1 << 60

    __slots__ = ("head", "tail", "count", "relabels")

    def __init__(self):
        self.head = OItem(0)       # immovable sentinel
        self.tail = self.head
        self.count = 0
        self.relabels = 0

    def first(self) -> OItem:
        return self.head

    def insert_after(self, item: OItem) -> OItem:
        nxt = item.next
        if nxt is None:
            tag = item.tag + self.STRIDE
            if tag >= self.SPACE:
                self._respace_all()
                tag = item.tag + self.STRIDE
        else:
            gap = nxt.tag - item.tag
            if gap < 2:
                self._relabel_around(item)
                nxt = item.next
                gap = nxt.tag - item.tag
            tag = item.tag + gap // 2
        new = OItem(tag)
        new.prev = item
        new.next = nxt
        item.next = new
        if nxt is None:
            self.tail = new
        else:
            nxt.prev = new
        self.count += 1
        return new

    def insert_before(self, item: OItem) -> OItem:
        return self.insert_after(item.prev)

    @staticmethod
    def compare(a: OItem, b: OItem) -> int:
        return -1 if a.tag < b.tag else (0 if a.tag == b.tag else 1)

    def _relabel_around(self, item: OItem) -> None:
        self.relabels += 1
        w = 8
        while True:
            base = (item.tag // w) * w
            hi = base + w
            first = item
            while first.prev is not None and first.prev.tag >= base:
                first = first.prev
            movable = []
            cur = first
            while cur is not None and cur.tag < hi:
                if cur is not self.head:
                    movable.append(cur)
                cur = cur.next
            if (len(movable) + 1) * 2 <= w:
                stride = w // (len(movable) + 1)
                for i, m in enumerate(movable):
                    m.tag = base + (i + 1) * stride
                return
            if w >= self.SPACE:
                self._respace_all()
                return
            w <<= 2

    def _respace_all(self) -> None:
        self.relabels += 1
        cur = self.head.next
        t = self.STRIDE
        while cur is not None:
            cur.tag = t
            t += self.STRIDE
            cur = cur.next
        if t >= self.SPACE:
            raise OverflowError("order list tag space exhausted")

    def items(self):
        cur = self.head.next
        while cur is not None:
            yield cur
            cur = cur.next


# ---------------------------------------------------------------------------


class _DynBlock:
    """One static block of the logarithmic method: a merge tree over points
    ordered by their x items' current order (stable under relabeling)."""

    __slots__ = ("pts", "size", "ynodes", "paynodes")

    def __init__(self, pts):
        # pts already sorted by x order
        self.pts = pts
        size = 1
        while size < max(1, len(pts)):
            size <<= 1
        self.size = size
        self.ynodes: list = [[] for _ in range(2 * size)]
        self.paynodes: list = [[] for _ in range(2 * size)]
        for i, p in enumerate(pts):
            self.ynodes[size + i] = [p]
        for v in range(size - 1, 0, -1):
            a, b = self.ynodes[2 * v], self.ynodes[2 * v + 1]
            merged = []
            i = j = 0
            while i < len(a) or j < len(b):
                if j >= len(b) or (i < len(a) and a[i].y.tag <= b[j].y.tag):
                    merged.append(a[i])
                    i += 1
                else:
                    merged.append(b[j])
                    j += 1
            self.ynodes[v] = merged

    def _canon(self, xlo: int, xhi: int):
        l = bisect_left(self.pts, xlo, key=lambda p: p.x.tag) + self.size
        r = bisect_right(self.pts, xhi, key=lambda p: p.x.tag) + self.size
        while l < r:
            if l & 1:
                yield l
                l += 1
            if r & 1:
                r -= 1
                yield r
            l >>= 1
            r >>= 1

    def report(self, xlo, xhi, ylo, yhi, out):
        for v in self._canon(xlo, xhi):
            ys = self.ynodes[v]
            a = bisect_left(ys, ylo, key=lambda p: p.y.tag)
            b = bisect_right(ys, yhi, key=lambda p: p.y.tag)
            out.extend(ys[a:b])

    def min_payload(self, xlo, xhi, ylo, yhi, best):
        for v in self._canon(xlo, xhi):
            ys = self.ynodes[v]
            a = bisect_left(ys, ylo, key=lambda p: p.y.tag)
            b = bisect_right(ys, yhi, key=lambda p: p.y.tag)
            for p in ys[a:b]:
                if best is None or p.pay < best:
                    best = p.pay
        return best

    def any_in(self, xlo, xhi, ylo, yhi) -> bool:
        for v in self._canon(xlo, xhi):
            ys = self.ynodes[v]
            a = bisect_left(ys, ylo, key=lambda p: p.y.tag)
            if a < len(ys) and ys[a].y.tag <= yhi:
                return True
        return False


class DynPoint:
    __slots__ = ("x", "y", "pay")

    def __init__(self, x: OItem, y: OItem, pay):
        self.x = x
        self.y = y
        self.pay = pay


class DynamicPointSet:
    """Insert-only 2D point set keyed by order-list items; supports exact
    rectangle reporting, emptiness and payload minima."""

    __slots__ = ("blocks", "count")

    def __init__(self):
        self.blocks: list[_DynBlock | None] = []
        self.count = 0

    def insert(self, x: OItem, y: OItem, pay) -> DynPoint:
        p = DynPoint(x, y, pay)
        carry = [p]
        i = 0
        while True:
            if i == len(self.blocks):
                self.blocks.append(None)
            if self.blocks[i] is None:
                carry.sort(key=lambda q: q.x.tag)
                self.blocks[i] = _DynBlock(carry)
                break
            carry.extend(self.blocks[i].pts)
            self.blocks[i] = None
            i += 1
        self.count += 1
        return p

    def _rect(self, xlo_it, xhi_it, ylo_it, yhi_it):
        return (xlo_it.tag, xhi_it.tag, ylo_it.tag, yhi_it.tag)

    def report(self, xlo_it, xhi_it, ylo_it, yhi_it) -> list[DynPoint]:
        xlo, xhi, ylo, yhi = self._rect(xlo_it, xhi_it, ylo_it, yhi_it)
        out: list[DynPoint] = []
        for blk in self.blocks:
            if blk is not None:
                blk.report(xlo, xhi, ylo, yhi, out)
        return out

    def any_in(self, xlo_it, xhi_it, ylo_it, yhi_it) -> bool:
        xlo, xhi, ylo, yhi = self._rect(xlo_it, xhi_it, ylo_it, yhi_it)
        return any(blk is not None and blk.any_in(xlo, xhi, ylo, yhi)
                   for blk in self.blocks)

    def min_payload(self, xlo_it, xhi_it, ylo_it, yhi_it):
        xlo, xhi, ylo, yhi = self._rect(xlo_it, xhi_it, ylo_it, yhi_it)
        best = None
        for blk in self.blocks:
            if blk is not None:
                best = blk.min_payload(xlo, xhi, ylo, yhi, best)
        return best
