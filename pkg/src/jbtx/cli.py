"""Command line front end: build, search, verify, delta, serve."""

from __future__ import annotations

import argparse
import json
import sys
import time

from .builder import StreamBuilder
from .oracle import delta, dk
from .serialize import IndexFormatError, load_index, save_index

DELTA_ORACLE_LIMIT = 1 << 14


def _iter_symbols(path: str | None, tokens: bool):
    """Stream symbols from a file or stdin without random access."""
    if tokens:
        fh = sys.stdin if path in (None, "-") else open(path, "r")
        try:
            for line in fh:
                for tok in line.split():
                    yield int(tok)
        finally:
            if fh is not sys.stdin:
                fh.close()
    else:
        fh = sys.stdin.buffer if path in (None, "-") else open(path, "rb")
        try:
            while True:
                chunk = fh.read(1 << 16)
                if not chunk:
                    return
                yield from chunk
        finally:
            if fh is not sys.stdin.buffer:
                fh.close()


def _read_symbols(path: str, tokens: bool) -> list[int]:
    return list(_iter_symbols(path, tokens))


def _pattern_symbols(args) -> list[int]:
    if args.pattern is not None:
        if args.tokens:
            return [int(tok) for tok in args.pattern.split()]
        return list(args.pattern.encode("utf-8"))
    return _read_symbols(args.pattern_file, args.tokens)


def cmd_build(args) -> int:
    builder = StreamBuilder(deterministic=args.deterministic)
    t0 = time.perf_counter()
    try:
        for c in _iter_symbols(args.input, args.tokens):
            builder.feed_letter(c)
        index = builder.finish()
    except (OSError, ValueError) as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return 1
    try:
        save_index(index, args.output)
    except OSError as exc:
        print(f"cannot write index: {exc}", file=sys.stderr)
        return 1
    if args.stats_json is not None:
        stats = index.stats.as_dict()
        stats["wall_time"] = time.perf_counter() - t0
        stats["tree_nodes"] = index.node_count
        per_level: dict[int, int] = {}
        for node in index.nodes():
            per_level[node.level] = per_level.get(node.level, 0) + 1
        stats["level_counts"] = {str(k): v for k, v in sorted(per_level.items())}
        stats["trie_nodes"] = {
            "ids": index.t_id.size,
            "fwd": index.t_fwd.trie.size,
            "rev": index.t_rev.trie.size,
        }
        stats["pair_points"] = len(index.pairs)
        if args.delta_max and index.n <= args.delta_max:
            text = _read_symbols(args.input, args.tokens)
            d = delta(text)
            stats["delta"] = f"{d.numerator}/{d.denominator}"
        payload = json.dumps(stats, indent=2)
        if args.stats_json == "-":
            print(payload)
        else:
            with open(args.stats_json, "w") as fh:
                fh.write(payload + "\n")
    return 0


def _load(path: str):
    try:
        return load_index(path)
    except (OSError, IndexFormatError) as exc:
        print(f"cannot load index: {exc}", file=sys.stderr)
        return None


def cmd_search(args) -> int:
    if args.batch:
        index = _load(args.index)
        if index is None:
            return 1
        with open(args.batch, "rb") as fh:
            lines = fh.read().splitlines()
        if args.tokens:
            patterns = [[int(tok) for tok in line.split()] for line in lines]
        else:
            patterns = [list(line) for line in lines]
        # queries are read-only over the finalized index
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=4) as pool:
            results = list(pool.map(index.search, patterns))
        for positions in results:
            if args.count_only:
                print(len(positions))
            elif args.json:
                print(json.dumps(positions))
            else:
                print(" ".join(map(str, positions)))
        return 0
    pattern = _pattern_symbols(args)
    if args.server:
        import httpx
        resp = httpx.post(args.server.rstrip("/") + "/search",
                          json={"pattern": pattern,
                                "count_only": args.count_only},
                          timeout=60.0)
        if resp.status_code != 200:
            print(f"server error: {resp.text}", file=sys.stderr)
            return 1
        body = resp.json()
        if args.count_only:
            print(body["count"])
        elif args.json:
            print(json.dumps(body["positions"]))
        else:
            for p in body["positions"]:
                print(p)
        return 0
    index = _load(args.index)
    if index is None:
        return 1
    try:
        positions = index.search(pattern)
    except ValueError as exc:
        print(f"bad pattern: {exc}", file=sys.stderr)
        return 1
    if args.count_only:
        print(len(positions))
    elif args.json:
        print(json.dumps(positions))
    else:
        for p in positions:
            print(p)
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification
    index = _load(args.index)
    if index is None:
        return 1
    text = _read_symbols(args.text, args.tokens)
    if len(text) != index.n:
        print(f"text length {len(text)} != indexed length {index.n}",
              file=sys.stderr)
        return 1
    results = run_verification(index, text, seed=args.seed)
    bad = 0
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        bad += 0 if ok else 1
    return 1 if bad else 0


def cmd_delta(args) -> int:
    text = _read_symbols(args.text, args.tokens)
    if len(text) == 0:
        print("empty input", file=sys.stderr)
        return 1
    if len(text) > args.max_n:
        print(f"input of length {len(text)} exceeds the oracle bound "
              f"{args.max_n}; rerun with --max-n or use a prefix",
              file=sys.stderr)
        return 1
    d = delta(text)
    print(f"delta = {d.numerator}/{d.denominator}")
    print("k,d_k")
    for k in range(1, len(text) + 1):
        print(f"{k},{dk(text, k)}")
    return 0


def cmd_serve(args) -> int:
    index = _load(args.index)
    if index is None:
        return 1
    import uvicorn

    from .service import create_app
    app = create_app(index)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jbtx",
        description="streaming compressed substring-search index")
    sub = ap.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="stream a corpus into an index file")
    b.add_argument("input", nargs="?", default="-",
                   help="input file (default: stdin)")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--tokens", action="store_true",
                   help="whitespace-separated integer tokens instead of bytes")
    b.add_argument("--deterministic", action="store_true")
    b.add_argument("--stats-json", default=None,
                   help="write build statistics to a JSON file ('-': stdout)")
    b.add_argument("--delta-max", type=int, default=0,
                   help="also compute delta when n is at most this")
    b.set_defaults(fn=cmd_build)

    s = sub.add_parser("search", help="report occurrences of a pattern")
    s.add_argument("index")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--pattern")
    g.add_argument("--pattern-file")
    g.add_argument("--batch", help="file with one pattern per line")
    s.add_argument("--tokens", action="store_true")
    s.add_argument("--count-only", action="store_true")
    s.add_argument("--json", action="store_true")
    s.add_argument("--server", default=None,
                   help="query a running service instead of a local index")
    s.set_defaults(fn=cmd_search)

    v = sub.add_parser("verify", help="run the invariant suites")
    v.add_argument("index")
    v.add_argument("text")
    v.add_argument("--tokens", action="store_true")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(fn=cmd_verify)

    d = sub.add_parser("delta", help="string complexity table")
    d.add_argument("text")
    d.add_argument("--tokens", action="store_true")
    d.add_argument("--max-n", type=int, default=DELTA_ORACLE_LIMIT)
    d.set_defaults(fn=cmd_delta)

    sv = sub.add_parser("serve", help="serve a built index over HTTP")
    sv.add_argument("index")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8641)
    sv.set_defaults(fn=cmd_serve)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
