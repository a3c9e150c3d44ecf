"""paperx: compile a parsed academic paper into slides, posters, and posts.

The pipeline has two halves: construction of the Scholar DAG intermediate
representation from a Markdown bundle, and three backends that lower the
DAG into a slide deck, a single-page poster, and a promotion post. All
model traffic flows through a record/replay gateway, so a checked-in
transcript reproduces every output byte-for-byte offline.
"""

__version__ = "0.1.0"

from .dag import ScholarDag, TextNode, TraversalBudget, VisualNode, bfs_select, validate

__all__ = [
    "ScholarDag",
    "TextNode",
    "VisualNode",
    "TraversalBudget",
    "bfs_select",
    "validate",
    "__version__",
]
