import random

from jbtx.geom import DynamicPointSet, OrderList, StaticPairSet


def test_static_empty():
    r = StaticPairSet([])
    assert r.report(0, 10, 0, 10) == []


def test_static_single_point():
    r = StaticPairSet([(3, 4, "p")])
    assert r.report(0, 10, 0, 10) == ["p"]
    assert r.report(4, 10, 0, 10) == []
    assert r.report(3, 3, 4, 4) == ["p"]
    assert r.report(0, 10, 5, 9) == []


def test_static_matches_linear_scan():
    rng = random.Random(41)
    pts = [(rng.randrange(200), rng.randrange(200), i) for i in range(2000)]
    r = StaticPairSet(pts)
    for _ in range(400):
        xlo = rng.randrange(220) - 10
        xhi = xlo + rng.randrange(60)
        ylo = rng.randrange(220) - 10
        yhi = ylo + rng.randrange(60)
        want = sorted(i for (x, y, i) in pts
                      if xlo <= x <= xhi and ylo <= y <= yhi)
        assert sorted(r.report(xlo, xhi, ylo, yhi)) == want


def test_orderlist_basic():
    ol = OrderList()
    a = ol.insert_after(ol.head)
    b = ol.insert_after(a)
    c = ol.insert_after(a)
    assert a.tag < c.tag < b.tag
    assert OrderList.compare(a, a) == 0
    assert OrderList.compare(a, b) == -1
    assert OrderList.compare(b, c) == 1


def test_orderlist_random_interleavings():
    # positional oracle: an independent linked mirror of every insertion
    rng = random.Random(42)
    ol = OrderList()
    nxt = {}   # independent successor map
    items = []
    first = ol.insert_after(ol.head)
    nxt[first] = None
    items.append(first)
    for _ in range(100000):
        anchor = items[rng.randrange(len(items))]
        new = ol.insert_after(anchor)
        nxt[new] = nxt[anchor]
        nxt[anchor] = new
        items.append(new)
    ref = []
    cur = first
    while cur is not None:
        ref.append(cur)
        cur = nxt[cur]
    tags = [it.tag for it in ref]
    assert tags == sorted(tags)
    assert len(set(tags)) == len(tags)
    assert list(ol.items()) == ref
    assert ol.relabels > 0


def test_orderlist_adversarial_same_spot():
    ol = OrderList()
    cur = ol.insert_after(ol.head)
    prev = []
    for _ in range(4000):
        prev.append(cur)
        cur = ol.insert_after(cur.prev if cur.prev is not ol.head else cur)
    it = list(ol.items())
    tags = [x.tag for x in it]
    assert tags == sorted(tags) and len(set(tags)) == len(tags)


def _naive_report(pts, xlo, xhi, ylo, yhi):
    return sorted(id(p) for p in pts
                  if xlo.tag <= p.x.tag <= xhi.tag and ylo.tag <= p.y.tag <= yhi.tag)


def test_dynamic_point_set_differential():
    rng = random.Random(43)
    xs = OrderList()
    ys = OrderList()
    xitems = [xs.insert_after(xs.head)]
    yitems = [ys.insert_after(ys.head)]
    ps = DynamicPointSet()
    naive = []
    for step in range(1500):
        op = rng.random()
        if op < 0.45 or not naive:
            xi = xs.insert_after(xitems[rng.randrange(len(xitems))])
            yi = ys.insert_after(yitems[rng.randrange(len(yitems))])
            xitems.append(xi)
            yitems.append(yi)
            pay = (rng.randrange(1000), step)
            naive.append(ps.insert(xi, yi, pay))
        else:
            a, b = sorted(rng.sample(range(len(xitems)), 2),
                          key=lambda i: xitems[i].tag)
            c, d = sorted(rng.sample(range(len(yitems)), 2),
                          key=lambda i: yitems[i].tag)
            args = (xitems[a], xitems[b], yitems[c], yitems[d])
            got = sorted(id(p) for p in ps.report(*args))
            want = _naive_report(naive, *args)
            assert got == want
            want_min = min((p.pay for p in naive if id(p) in set(want)),
                           default=None)
            assert ps.min_payload(*args) == want_min
            assert ps.any_in(*args) == bool(want)


def test_dynamic_point_set_empty():
    xs = OrderList()
    a = xs.insert_after(xs.head)
    ps = DynamicPointSet()
    assert ps.report(a, a, a, a) == []
    assert ps.min_payload(a, a, a, a) is None
    assert not ps.any_in(a, a, a, a)
