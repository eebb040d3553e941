"""HTTP query service over a loaded index.

Queries are read-only, so a single loaded index can serve concurrent
requests; building and verification stay in the CLI.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .index import Index


class SearchRequest(BaseModel):
    pattern: str | list[int] = Field(description="text or integer tokens")
    count_only: bool = False


class SearchResponse(BaseModel):
    count: int
    positions: list[int]


class StatsResponse(BaseModel):
    n: int
    tree_nodes: int
    trie_nodes: dict[str, int]
    pair_points: int
    deterministic: bool


def create_app(index: Index) -> FastAPI:
    app = FastAPI(title="jbtx", version="0.1.0")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "n": index.n}

    @app.post("/search", response_model=SearchResponse)
    def search(req: SearchRequest):
        pattern = (list(req.pattern.encode("utf-8"))
                   if isinstance(req.pattern, str) else req.pattern)
        if not pattern:
            raise HTTPException(status_code=422, detail="empty pattern")
        positions = index.search(pattern)
        return SearchResponse(
            count=len(positions),
            positions=[] if req.count_only else positions)

    @app.get("/stats", response_model=StatsResponse)
    def stats():
        return StatsResponse(
            n=index.n,
            tree_nodes=index.node_count,
            trie_nodes={
                "ids": index.t_id.size,
                "fwd": index.t_fwd.trie.size,
                "rev": index.t_rev.trie.size,
            },
            pair_points=len(index.pairs),
            deterministic=index.deterministic)

    return app
