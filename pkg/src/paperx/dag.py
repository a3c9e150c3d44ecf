"""Scholar DAG data model: text/visual nodes, validation, traversal, JSON I/O.

The DAG is a tree of text nodes (the paper hierarchy) plus a flat set of
visual nodes (figures and formula images) connected to text nodes by
cross-modal edges. Backends only ever read it; construction happens in
:mod:`paperx.paper2dag` or through :func:`deserialize`.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field

from .errors import InvalidDag, ParseError

DEFAULT_MAX_DEPTH = 4

IMAGE_REF_RE = re.compile(r"^!\[\]\(.+\)$")


@dataclass
class TextNode:
    """One hierarchy node; ``content`` is single-line Markdown."""

    name: str
    content: str
    edge: list[str] = field(default_factory=list)
    level: int = 0
    visual_refs: list[str] = field(default_factory=list)


@dataclass
class VisualNode:
    """A figure or formula image. ``name`` is its Markdown reference."""

    name: str
    caption: str
    is_formula: bool
    resolution: tuple[int, int]

    @property
    def path(self) -> str:
        """Relative image path extracted from the Markdown reference."""
        return self.name[4:-1] if IMAGE_REF_RE.match(self.name) else self.name

    @property
    def aspect(self) -> float:
        w, h = self.resolution
        return w / h if h else 0.0


@dataclass
class TraversalBudget:
    """Cap on the number of content nodes a backend may select."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"traversal budget must be >= 1, got {self.k}")


@dataclass
class ScholarDag:
    root: str
    text_nodes: dict[str, TextNode] = field(default_factory=dict)
    visual_nodes: dict[str, VisualNode] = field(default_factory=dict)
    cross_edges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.rebuild_mirrors()

    def rebuild_mirrors(self) -> None:
        """Recompute every text node's ``visual_refs`` from ``cross_edges``."""
        for node in self.text_nodes.values():
            node.visual_refs = []
        for text_name, visual_name in self.cross_edges:
            node = self.text_nodes.get(text_name)
            if node is not None and visual_name not in node.visual_refs:
                node.visual_refs.append(visual_name)

    def visuals_for(self, text_name: str) -> list[VisualNode]:
        node = self.text_nodes.get(text_name)
        if node is None:
            return []
        return [self.visual_nodes[v] for v in node.visual_refs if v in self.visual_nodes]


def validate(dag: ScholarDag, max_depth: int = DEFAULT_MAX_DEPTH) -> list[str]:
    """Check every structural invariant; returns one message per violation.

    Violations are data, not failures: an empty list means the dag is valid.
    """
    out: list[str] = []

    roots = [n.name for n in dag.text_nodes.values() if n.level == 0]
    if len(roots) != 1:
        out.append(f"expected exactly one level-0 node, found {len(roots)}: {roots}")
    elif roots[0] != dag.root:
        out.append(f"level-0 node '{roots[0]}' is not the declared root '{dag.root}'")
    if dag.root not in dag.text_nodes:
        out.append(f"root '{dag.root}' is not a text node")

    parents: dict[str, list[str]] = {}
    for node in dag.text_nodes.values():
        if "\n" in node.content or "\r" in node.content:
            out.append(f"content of '{node.name}' contains raw newline characters")
        if node.level > max_depth:
            out.append(f"node '{node.name}' exceeds max depth {max_depth} (level {node.level})")
        for child_name in node.edge:
            child = dag.text_nodes.get(child_name)
            if child is None:
                out.append(f"dangling edge: '{node.name}' lists missing child '{child_name}'")
                continue
            parents.setdefault(child_name, []).append(node.name)
            if child.level != node.level + 1:
                out.append(
                    f"level discontinuity: child '{child_name}' of '{node.name}' "
                    f"has level {child.level}, expected {node.level + 1}"
                )

    for name in dag.text_nodes:
        if name == dag.root:
            if name in parents:
                out.append(f"root '{name}' has a parent: {parents[name]}")
            continue
        n_parents = len(parents.get(name, []))
        if n_parents == 0:
            out.append(f"node '{name}' is unreachable (no parent)")
        elif n_parents > 1:
            out.append(f"node '{name}' has {n_parents} parents: {parents[name]}")

    if dag.root in dag.text_nodes:
        reachable = {dag.root}
        queue = deque([dag.root])
        while queue:
            for child in dag.text_nodes[queue.popleft()].edge:
                if child in dag.text_nodes and child not in reachable:
                    reachable.add(child)
                    queue.append(child)
        for name in dag.text_nodes:
            if name not in reachable and len(parents.get(name, [])) == 1:
                out.append(f"node '{name}' is not reachable from the root")

    for vis in dag.visual_nodes.values():
        if not IMAGE_REF_RE.match(vis.name):
            out.append(f"visual node name '{vis.name}' is not an image reference")
        w, h = vis.resolution
        if w <= 0 or h <= 0:
            out.append(f"visual node '{vis.name}' has non-positive resolution {w}x{h}")

    for text_name, visual_name in dag.cross_edges:
        if text_name not in dag.text_nodes:
            out.append(f"cross edge references missing text node '{text_name}'")
        if visual_name not in dag.visual_nodes:
            out.append(f"cross edge references missing visual node '{visual_name}'")

    derived: dict[str, list[str]] = {}
    for text_name, visual_name in dag.cross_edges:
        refs = derived.setdefault(text_name, [])
        if visual_name not in refs:
            refs.append(visual_name)
    for node in dag.text_nodes.values():
        if node.visual_refs != derived.get(node.name, []):
            out.append(f"visual_refs of '{node.name}' out of sync with cross edges")

    return out


def bfs_select(dag: ScholarDag, budget: TraversalBudget) -> list[str]:
    """Level-order traversal from the root, root excluded, capped at ``budget.k``.

    Siblings keep their edge-list (document) order, so the result is
    deterministic for a given dag.
    """
    violations = validate(dag)
    if violations:
        raise InvalidDag(violations)
    selected: list[str] = []
    queue = deque(dag.text_nodes[dag.root].edge)
    seen = set(queue)
    while queue and len(selected) < budget.k:
        name = queue.popleft()
        selected.append(name)
        for child in dag.text_nodes[name].edge:
            if child not in seen:
                seen.add(child)
                queue.append(child)
    return selected


# --- JSON serialization -----------------------------------------------------
#
# Wire format: one top-level object {"nodes": [...]}. Text nodes carry the
# five fields name/content/edge/level/visual_node, where visual_node embeds
# the visual objects this node references. Visual nodes referenced by no text
# node appear as standalone entries with "visual_node": 1.

def _visual_payload(vis: VisualNode) -> dict:
    return {
        "name": vis.name,
        "caption": vis.caption,
        "visual_node": 1,
        "formula": 1 if vis.is_formula else 0,
        "resolution": f"{vis.resolution[0]}x{vis.resolution[1]}",
    }


def node_payload(dag: ScholarDag, name: str) -> dict:
    """The Appendix-schema dict for one text node, visuals embedded."""
    node = dag.text_nodes[name]
    return {
        "name": node.name,
        "content": node.content,
        "edge": list(node.edge),
        "level": node.level,
        "visual_node": [
            _visual_payload(dag.visual_nodes[v])
            for v in node.visual_refs
            if v in dag.visual_nodes
        ],
    }


def serialize(dag: ScholarDag) -> bytes:
    violations = validate(dag)
    if violations:
        raise InvalidDag(violations)
    referenced = {v for _, v in dag.cross_edges}
    nodes: list[dict] = [node_payload(dag, name) for name in dag.text_nodes]
    nodes.extend(
        _visual_payload(vis) for name, vis in dag.visual_nodes.items() if name not in referenced
    )
    text = json.dumps({"nodes": nodes}, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _parse_resolution(raw: object, where: str) -> tuple[int, int]:
    if not isinstance(raw, str) or "x" not in raw:
        raise ParseError(f"{where}: resolution must be a 'WxH' string, got {raw!r}")
    w_s, _, h_s = raw.partition("x")
    try:
        return int(w_s), int(h_s)
    except ValueError:
        raise ParseError(f"{where}: malformed resolution {raw!r}") from None


def _parse_visual(obj: dict, where: str) -> VisualNode:
    try:
        return VisualNode(
            name=obj["name"],
            caption=obj.get("caption", ""),
            is_formula=bool(obj.get("formula", 0)),
            resolution=_parse_resolution(obj.get("resolution"), where),
        )
    except KeyError as exc:
        raise ParseError(f"{where}: missing field {exc}") from None


def deserialize(data: bytes) -> ScholarDag:
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc.reason}", exc.start) from None
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise ParseError("top-level object must have a 'nodes' list")

    text_nodes: dict[str, TextNode] = {}
    visual_nodes: dict[str, VisualNode] = {}
    cross_edges: list[tuple[str, str]] = []
    root = ""
    for i, obj in enumerate(doc["nodes"]):
        where = f"nodes[{i}]"
        if not isinstance(obj, dict):
            raise ParseError(f"{where}: expected an object")
        if obj.get("visual_node") == 1:
            vis = _parse_visual(obj, where)
            visual_nodes.setdefault(vis.name, vis)
            continue
        try:
            node = TextNode(
                name=obj["name"],
                content=obj["content"],
                edge=list(obj["edge"]),
                level=int(obj["level"]),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"{where}: bad text node ({exc})") from None
        if node.name in text_nodes:
            raise ParseError(f"{where}: duplicate node name '{node.name}'")
        text_nodes[node.name] = node
        if node.level == 0 and not root:
            root = node.name
        embedded = obj.get("visual_node", [])
        if not isinstance(embedded, list):
            raise ParseError(f"{where}: visual_node must be a list on text nodes")
        for j, vobj in enumerate(embedded):
            vis = _parse_visual(vobj, f"{where}.visual_node[{j}]")
            visual_nodes.setdefault(vis.name, vis)
            cross_edges.append((node.name, vis.name))

    if not root:
        raise ParseError("no level-0 root node present")
    return ScholarDag(
        root=root, text_nodes=text_nodes, visual_nodes=visual_nodes, cross_edges=cross_edges
    )
