import random

from jbtx.tries import CompactedTrie, TrieNode, ZFastTrie, two_fattest


def tuple_reader(payload, lo, hi):
    return payload[lo:hi]


def make_trie(keys):
    t = CompactedTrie(tuple_reader)
    nodes = {}
    for k in keys:
        node, _ = t.insert(lambda lo, hi, k=k: k[lo:hi], len(k), k)
        node.value = k
        nodes[k] = node
    return t, nodes


def test_two_fattest():
    assert two_fattest(1, 1) == 1
    assert two_fattest(3, 8) == 8
    assert two_fattest(5, 7) == 6
    assert two_fattest(4, 5) == 4
    assert two_fattest(9, 11) == 10
    for lo in range(1, 60):
        for hi in range(lo, 60):
            f = two_fattest(lo, hi)
            assert lo <= f <= hi
            tz = (f & -f).bit_length() - 1
            for x in range(lo, hi + 1):
                assert (x & -x).bit_length() - 1 <= tz or x == f


def test_insert_empty_then_existing():
    t = CompactedTrie(tuple_reader)
    k = (1, 2, 3)
    n1, ev1 = t.insert(lambda lo, hi: k[lo:hi], 3, k)
    assert ev1 == [("leaf", n1, 1)]
    assert n1.depth == 3 and t.root.kids[1] is n1
    n2, ev2 = t.insert(lambda lo, hi: k[lo:hi], 3, k)
    assert n2 is n1 and ev2 == [("exact", n1)]


def test_insert_split():
    t = CompactedTrie(tuple_reader)
    a = (1, 2, 3, 4)
    b = (1, 2, 9)
    na, _ = t.insert(lambda lo, hi: a[lo:hi], 4, a)
    nb, ev = t.insert(lambda lo, hi: b[lo:hi], 3, b)
    kinds = [e[0] for e in ev]
    assert kinds == ["split", "leaf"]
    mid = ev[1][1].parent
    assert mid.depth == 2 and set(mid.kids) == {3, 9}


def test_trie_contents_match_reference_set():
    rng = random.Random(51)
    keys = set()
    while len(keys) < 10000:
        keys.add(tuple(rng.randrange(6) for _ in range(rng.randrange(1, 12))))
    t, nodes = make_trie(sorted(keys))

    # enumerate stored keys by DFS, rebuilding labels through payloads
    found = set()

    def dfs(node, prefix):
        if node.value is not None:
            found.add(prefix)
        for unit, kid in node.kids.items():
            lab = (unit,) + tuple(tuple_reader(kid.payload,
                                               node.depth + 1, kid.depth))
            dfs(kid, prefix + lab)

    dfs(t.root, ())
    assert found == keys


def test_descend_exact_prefix_and_mismatch():
    keys = [(1, 2, 3, 4, 5), (1, 2, 7), (2,)]
    t, nodes = make_trie(keys)
    node, exact = t.descend((1, 2, 3, 4, 5))
    assert exact and node is nodes[(1, 2, 3, 4, 5)]
    node, exact = t.descend((1, 2, 3))
    assert not exact and node is nodes[(1, 2, 3, 4, 5)]
    assert t.descend((1, 2, 3, 9)) is None
    assert t.descend((3,)) is None
    assert t.descend((1, 9)) is None


def test_inorder_ranks_match_dfs_oracle():
    rng = random.Random(52)
    keys = set()
    while len(keys) < 800:
        keys.add(tuple(rng.randrange(4) for _ in range(rng.randrange(1, 10))))
    t, nodes = make_trie(sorted(keys))
    count = t.finalize_ranks()

    # oracle: lexicographic order of node strings == preorder rank order
    strings = {}

    def dfs(node, prefix):
        strings[node] = prefix
        for unit, kid in node.kids.items():
            lab = (unit,) + tuple(tuple_reader(kid.payload,
                                               node.depth + 1, kid.depth))
            dfs(kid, prefix + lab)

    dfs(t.root, ())
    by_rank = sorted(strings, key=lambda n: n.rank)
    assert [strings[n] for n in by_rank] == sorted(strings.values())
    assert t.root.rank == 0 and t.root.rank_hi == count - 1
    for node in strings:
        lo, hi = node.rank, node.rank_hi
        inside = [m for m in strings if lo <= m.rank <= hi]
        for m in inside:
            assert strings[m][:len(strings[node])] == strings[node]
        assert len(inside) == hi - lo + 1


def make_zfast(keys):
    z = ZFastTrie(tuple_reader, lambda node, ln: node.payload[:ln])
    nodes = {}
    for k in keys:
        node = z.insert(lambda lo, hi, k=k: k[lo:hi], len(k), k)
        node.value = k
        nodes[k] = node
    return z, nodes


def test_zfast_matches_plain_walk():
    rng = random.Random(53)
    keys = set()
    while len(keys) < 3000:
        keys.add(tuple(rng.randrange(4) for _ in range(rng.randrange(1, 14))))
    keys = sorted(keys)
    z, nodes = make_zfast(keys)
    queries = list(keys)
    for _ in range(3000):
        queries.append(tuple(rng.randrange(5)
                             for _ in range(rng.randrange(1, 16))))
    for q in queries:
        want = z.plain_locate(q)
        got = z.locate(len(q), lambda f: q[:f], lambda i: q[i])
        assert got is want, q


def test_zfast_handle_lookup_of_every_node():
    rng = random.Random(54)
    keys = set()
    while len(keys) < 500:
        keys.add(tuple(rng.randrange(3) for _ in range(rng.randrange(1, 12))))
    z, _ = make_zfast(sorted(keys))
    for node in z.trie.nodes():
        if node is z.trie.root:
            continue
        assert node.parent.depth < node.handle <= node.depth
        key = node.payload[:node.handle]
        got = z.handles.descend(key)
        assert got is not None and got[1] and got[0].value is node


def test_zfast_never_false_accepts():
    # adversarial: long shared prefixes, divergence late in an edge
    rng = random.Random(55)
    base = tuple(rng.randrange(2) for _ in range(64))
    keys = [base, base[:32] + (7,) + base[33:], base[:48]]
    z, nodes = make_zfast(keys)
    for _ in range(2000):
        q = list(base[:rng.randrange(1, 64)])
        if rng.random() < 0.8:
            q[rng.randrange(len(q))] = 9
        q = tuple(q)
        want = z.plain_locate(q)
        got = z.locate(len(q), lambda f: q[:f], lambda i: q[i])
        assert got is want
