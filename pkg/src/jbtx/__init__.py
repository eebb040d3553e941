"""jbtx: streaming compressed substring-search index."""

from .blocks import build_hierarchy, IdRegistry, lbit, vbit
from .jiggly import build_jiggly, prune, expand_string, weighted_ancestor
from .oracle import naive_search, dk, delta

__all__ = [
    "build_hierarchy", "IdRegistry", "lbit", "vbit",
    "build_jiggly", "prune", "expand_string", "weighted_ancestor",
    "naive_search", "dk", "delta",
    "build_index", "build_index_offline", "load_index", "save_index",
]


def __getattr__(name):
    # heavier subsystems are imported on first use
    if name in ("build_index", "build_index_offline"):
        from . import builder
        return getattr(builder, name)
    if name in ("load_index", "save_index", "canonical_bytes"):
        from . import serialize
        return getattr(serialize, name)
    raise AttributeError(name)
