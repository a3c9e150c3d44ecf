"""Build the Scholar DAG from a parsed paper bundle.

Input is the external converter's output layout: one Markdown file plus an
``images/`` directory. Stages: ingest, clean (pure deletion, mechanically
enforced), split into top-level sections, initialize the graph from the
metadata, decompose each section into a hierarchy, construct visual nodes,
and align text with visuals. Every model output is validated and retried
before the pipeline accepts it.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .dag import ScholarDag, TextNode, VisualNode, node_payload, serialize, validate
from .errors import (
    DeletionViolation,
    EmptyPaper,
    HallucinationError,
    InvalidDag,
    MetadataMissing,
    MissingImage,
    MissingMarkdown,
    SchemaError,
    SplitDriftError,
    TransportError,
    UnreadableImage,
    ValidationExhausted,
)
from .gateway import ChatRequest, Gateway, TextPart
from . import prompts

log = logging.getLogger(__name__)

SPLIT_DELIMITER = "===SPLIT==="

RASTER_EXTENSIONS = {".png", ".jpg", ".jpeg", ".gif", ".bmp", ".webp"}

IMAGE_MD_RE = re.compile(r"!\[[^\]]*\]\(([^)\s]+)\)")

REMOVAL_HEADING_RE = re.compile(
    r"^#{1,6}\s*(?:[\dIVXivx]+[\s.\-:]*)?\s*"
    r"(abstract|summary|overview|related works?|previous works?|background|"
    r"literature review|appendix(?:es)?|supplementary material|acknowledge?ments|"
    r"references|bibliography|citation list|limitations)\s*:?\s*$",
    re.IGNORECASE,
)

CAPTION_NUMBER_RE = re.compile(
    r"\b(figure|fig|table|tab|equation|eq)\.?\s*\(?(\d+)", re.IGNORECASE
)
ROMAN_CAPTION_RE = re.compile(
    r"\b(figure|fig|table|tab|equation|eq)\.?\s*\(?([IVXLC]+)\b", re.IGNORECASE
)

_REF_CLASS = {
    "figure": "figure",
    "fig": "figure",
    "table": "table",
    "tab": "table",
    "equation": "equation",
    "eq": "equation",
}
_CLASS_TOKENS = {
    "figure": r"(?:figure|fig\.?)",
    "table": r"(?:table|tab\.?)",
    "equation": r"(?:equation|eq\.?)",
}


@dataclass
class PaperBundle:
    root_dir: Path
    markdown: str
    images: list[tuple[str, int, int]]  # (relative path, width, height)
    metadata_overrides: dict[str, str] = field(default_factory=dict)


@dataclass
class SectionSplit:
    sections: list[tuple[str, str]]  # (inferred title, markdown body)


def norm_ws(text: str) -> str:
    return " ".join(text.split())


def norm_match(text: str) -> str:
    """Normalization used for substring traceability checks.

    Collapses whitespace and drops emphasis markers, since node contents
    have their newlines rewritten to spaces.
    """
    return norm_ws(text.translate(str.maketrans("", "", "*_`")))


def single_line(text: str) -> str:
    return norm_ws(text)


# --- ingest -----------------------------------------------------------------

def ingest(bundle_dir: str | Path, metadata_overrides: dict[str, str] | None = None) -> PaperBundle:
    """Read the bundle: the sole markdown file plus measured image inventory.

    Inventory order is first-reference order in the markdown; files present
    in the image directory but never referenced are appended in path order.
    """
    root = Path(bundle_dir)
    md_files = sorted(root.glob("*.md"))
    preferred = [p for p in md_files if p.name == "paper.md"]
    if preferred:
        md_path = preferred[0]
    elif len(md_files) == 1:
        md_path = md_files[0]
    elif not md_files:
        raise MissingMarkdown(f"no *.md file in {root}")
    else:
        raise MissingMarkdown(f"multiple *.md files in {root}: {[p.name for p in md_files]}")
    markdown = md_path.read_text(encoding="utf-8")

    seen: dict[str, None] = {}
    for match in IMAGE_MD_RE.finditer(markdown):
        rel = match.group(1)
        if rel.startswith(("http://", "https://", "data:")):
            continue
        if not (root / rel).exists():
            raise MissingImage(f"markdown references '{rel}' but the file does not exist")
        seen.setdefault(rel, None)

    images_dir = root / "images"
    if images_dir.is_dir():
        for path in sorted(images_dir.rglob("*")):
            if path.is_file() and path.suffix.lower() in RASTER_EXTENSIONS:
                seen.setdefault(path.relative_to(root).as_posix(), None)

    from PIL import Image, UnidentifiedImageError

    inventory: list[tuple[str, int, int]] = []
    for rel in seen:
        try:
            with Image.open(root / rel) as img:
                width, height = img.size
        except (UnidentifiedImageError, OSError) as exc:
            raise UnreadableImage(f"cannot decode image '{rel}': {exc}") from exc
        if width <= 0 or height <= 0:
            raise UnreadableImage(f"image '{rel}' has degenerate size {width}x{height}")
        inventory.append((rel, width, height))

    return PaperBundle(
        root_dir=root,
        markdown=markdown,
        images=inventory,
        metadata_overrides=dict(metadata_overrides or {}),
    )


# --- clean ------------------------------------------------------------------

def _subsequence_violations(output: str, source: str) -> list[str]:
    """Lines of ``output`` that do not occur in ``source`` as an ordered subsequence."""
    src_lines = [line.strip() for line in source.splitlines()]
    bad: list[str] = []
    i = 0
    for line in output.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        j = i
        while j < len(src_lines) and src_lines[j] != stripped:
            j += 1
        if j == len(src_lines):
            bad.append(stripped)
        else:
            i = j + 1
    return bad


def removal_headings(markdown: str) -> list[str]:
    return [
        line.strip()
        for line in markdown.splitlines()
        if REMOVAL_HEADING_RE.match(line.strip())
    ]


def _first_content_line(markdown: str) -> str:
    for line in markdown.splitlines():
        if line.strip():
            return line.strip()
    return ""


def clean(markdown: str, gw: Gateway, cfg: RunConfig) -> str:
    """Model-side deletion of low-relevance sections, mechanically verified.

    The output must be a line-subsequence of the input (pure deletion),
    must not retain removal-list headings, and must keep the title line.
    """
    title_line = _first_content_line(markdown)

    def validator(text: object) -> list[str]:
        out = str(text)
        violations = [
            f"output line is not present in the input (deletion-only rule): {line[:80]!r}"
            for line in _subsequence_violations(out, markdown)
        ]
        violations.extend(
            f"removal-list heading still present: {heading!r}"
            for heading in removal_headings(out)
        )
        if title_line and title_line not in (l.strip() for l in out.splitlines()):
            violations.append("the title line was deleted; it must be kept")
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.CLEAN,
        user_parts=[TextPart(markdown)],
        stage_tag="dag_decompose",
        temperature=cfg.temperature("dag_decompose"),
        max_output_tokens=16384,
    )
    try:
        return str(gw.complete_validated(request, validator, extractor=lambda t: t))
    except ValidationExhausted as exc:
        raise DeletionViolation(
            "cleaning failed the deletion-only check after retries: "
            + "; ".join(exc.violations)
        ) from exc


# --- section split ----------------------------------------------------------

def _infer_title(chunk: str) -> str:
    for line in chunk.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            return stripped.lstrip("#").strip()
        return stripped[:80]
    return "Untitled Section"


def heading_split(cleaned: str) -> SectionSplit:
    """Deterministic fallback: split at level-1 headings after the title."""
    lines = cleaned.splitlines()
    title_idx = next((i for i, l in enumerate(lines) if l.strip()), 0)
    heading_idxs = [
        i
        for i, l in enumerate(lines)
        if i > title_idx and l.startswith("# ") and not l.startswith("## ")
    ]
    if not heading_idxs:
        body_lines = lines[title_idx + 1 :]
        # drop the author line that immediately follows the title
        while body_lines and not body_lines[0].strip():
            body_lines = body_lines[1:]
        if body_lines:
            body_lines = body_lines[1:]
        body = "\n".join(body_lines).strip()
        if not body:
            raise EmptyPaper("document has no content beyond the metadata block")
        return SectionSplit(sections=[(_infer_title(body), body)])
    chunks = []
    bounds = heading_idxs + [len(lines)]
    for start, end in zip(bounds, bounds[1:]):
        chunk = "\n".join(lines[start:end]).strip()
        if chunk:
            chunks.append((_infer_title(chunk), chunk))
    return SectionSplit(sections=chunks)


def split_sections(cleaned: str, gw: Gateway | None, cfg: RunConfig) -> SectionSplit:
    """Model-side split at top-level section boundaries, drift-checked.

    Every chunk must be a contiguous piece of the input and the chunks in
    order must reproduce the input's tail (everything from the first
    section onward); the front matter is intentionally not a chunk.
    """
    if not cleaned.strip():
        raise EmptyPaper("nothing to split: cleaned document is empty")
    if gw is None or not cfg.llm_split:
        return heading_split(cleaned)

    norm_all = norm_match(cleaned)

    def validator(text: object) -> list[str]:
        chunks = [c.strip() for c in str(text).split(SPLIT_DELIMITER)]
        chunks = [c for c in chunks if c]
        if not chunks:
            return ["no chunks produced"]
        violations = []
        for idx, chunk in enumerate(chunks):
            if norm_match(chunk) not in norm_all:
                violations.append(f"chunk {idx + 1} is not a contiguous piece of the input")
        joined = norm_match(" ".join(chunks))
        if not norm_all.endswith(joined):
            violations.append(
                "chunks do not reassemble the input tail (content was lost, "
                "reordered, or rewritten)"
            )
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.SECTION_SPLIT,
        user_parts=[TextPart(cleaned)],
        stage_tag="dag_decompose",
        temperature=cfg.temperature("dag_decompose"),
        max_output_tokens=16384,
    )
    try:
        text = str(gw.complete_validated(request, validator, extractor=lambda t: t))
    except ValidationExhausted as exc:
        raise SplitDriftError(
            "section split failed the preservation check after retries: "
            + "; ".join(exc.violations)
        ) from exc
    chunks = [c.strip() for c in text.split(SPLIT_DELIMITER) if c.strip()]
    return SectionSplit(sections=[(_infer_title(c), c) for c in chunks])


# --- graph initialization ---------------------------------------------------

def _unique_name(name: str, taken: set[str]) -> str:
    if name not in taken:
        return name
    n = 2
    while f"{name} ({n})" in taken:
        n += 1
    return f"{name} ({n})"


def init_graph(
    bundle: PaperBundle,
    sections: SectionSplit,
    gw: Gateway | None,
    cfg: RunConfig,
    warnings: list[str] | None = None,
) -> dict[str, TextNode]:
    """Root node from the paper metadata plus one level-1 node per section."""
    if not sections.sections:
        raise EmptyPaper("no sections to build a graph from")

    title, authors = "", ""
    if gw is not None:
        def validator(value: object) -> list[str]:
            if not isinstance(value, dict) or not isinstance(value.get("nodes"), list):
                return ["output must be an object with a 'nodes' list"]
            nodes = value["nodes"]
            if len(nodes) != 1:
                return [f"expected exactly one root node, got {len(nodes)}"]
            node = nodes[0]
            violations = []
            for field_name in ("name", "content", "edge", "level", "visual_node"):
                if field_name not in node:
                    violations.append(f"root node missing field '{field_name}'")
            if node.get("level") != 0:
                violations.append("root node level must be strictly 0")
            if node.get("edge") != [] or node.get("visual_node") != []:
                violations.append("root node edge and visual_node must be empty lists")
            if not str(node.get("name", "")).strip():
                violations.append("root node name (the paper title) is empty")
            return violations

        request = ChatRequest(
            model=cfg.llm_model,
            system=prompts.INITIALIZE_DAG,
            user_parts=[TextPart(bundle.markdown)],
            stage_tag="dag_decompose",
            temperature=cfg.temperature("dag_decompose"),
        )
        try:
            value = gw.complete_validated(request, validator)
            root_obj = value["nodes"][0]
            title = str(root_obj["name"]).strip()
            authors = single_line(str(root_obj["content"]))
        except ValidationExhausted as exc:
            if not bundle.metadata_overrides.get("title"):
                raise MetadataMissing(
                    "could not extract the paper title: " + "; ".join(exc.violations)
                ) from exc
    else:
        title = _first_content_line(bundle.markdown).lstrip("#").strip()
        lines = [l.strip() for l in bundle.markdown.splitlines() if l.strip()]
        authors = lines[1] if len(lines) > 1 else ""

    overrides = bundle.metadata_overrides
    title = overrides.get("title") or title
    authors = overrides.get("authors") or authors
    if not title:
        raise MetadataMissing("no plausible title line found and no override supplied")

    meta_parts = [authors] if authors else []
    if overrides.get("affiliations"):
        meta_parts.append(overrides["affiliations"])
    if overrides.get("repo_url"):
        meta_parts.append(overrides["repo_url"])
    root_content = " | ".join(meta_parts)

    nodes: dict[str, TextNode] = {}
    root = TextNode(name=title, content=root_content, level=0)
    nodes[root.name] = root
    for sec_title, body in sections.sections:
        name = _unique_name(sec_title, set(nodes))
        if name != sec_title and warnings is not None:
            warnings.append(f"duplicate section name '{sec_title}' stored as '{name}'")
        nodes[name] = TextNode(name=name, content=single_line(body), level=1)
        root.edge.append(name)
    return nodes


# --- recursive decomposition ------------------------------------------------

def _subtree_schema_violations(value: object, base_level: int, max_depth: int) -> list[str]:
    if not isinstance(value, dict) or not isinstance(value.get("nodes"), list):
        return ["output must be an object with a 'nodes' list"]
    nodes = value["nodes"]
    if not nodes:
        return ["'nodes' list is empty; return at least the section root node"]
    violations: list[str] = []
    by_name: dict[str, dict] = {}
    for i, node in enumerate(nodes):
        if not isinstance(node, dict):
            violations.append(f"nodes[{i}] is not an object")
            continue
        if set(node.keys()) != {"name", "content", "edge", "level", "visual_node"}:
            violations.append(
                f"nodes[{i}] must have exactly the five fields "
                f"name/content/edge/level/visual_node, got {sorted(node.keys())}"
            )
            continue
        if node["visual_node"] != []:
            violations.append(f"nodes[{i}].visual_node must be []")
        if not isinstance(node["content"], str) or "\n" in node["content"]:
            violations.append(f"nodes[{i}].content must be a single-line string")
        if not isinstance(node["level"], int):
            violations.append(f"nodes[{i}].level must be an integer")
        name = str(node.get("name", ""))
        if name in by_name:
            violations.append(f"duplicate node name {name!r} in decomposition")
        by_name[name] = node
    if violations:
        return violations

    roots = [n for n in nodes if n["level"] == 1]
    if len(roots) != 1:
        return [f"expected exactly one level-1 section root, got {len(roots)}"]
    referenced: set[str] = set()
    for node in nodes:
        for child_name in node["edge"]:
            child = by_name.get(child_name)
            if child is None:
                violations.append(f"edge references unknown node {child_name!r}")
                continue
            if child_name in referenced:
                violations.append(f"node {child_name!r} has more than one parent")
            referenced.add(child_name)
            if child["level"] != node["level"] + 1:
                violations.append(
                    f"child {child_name!r} has level {child['level']}, "
                    f"expected {node['level'] + 1}"
                )
    for node in nodes:
        if node["level"] != 1 and node["name"] not in referenced:
            violations.append(f"node {node['name']!r} is not attached to the hierarchy")
        remapped = base_level + node["level"] - 1
        if remapped > max_depth:
            violations.append(
                f"node {node['name']!r} would sit at level {remapped}, beyond depth {max_depth}"
            )
    return violations


def _traceability_violations(value: dict) -> list[str]:
    violations: list[str] = []
    by_name = {n["name"]: n for n in value["nodes"]}
    for node in value["nodes"]:
        parent_norm = norm_match(node["content"])
        cursor = 0
        spans: list[tuple[int, int]] = []
        for child_name in node["edge"]:
            child_norm = norm_match(by_name[child_name]["content"])
            if not child_norm:
                violations.append(f"child {child_name!r} has empty content")
                continue
            pos = parent_norm.find(child_norm, cursor)
            if pos == -1:
                pos = parent_norm.find(child_norm)
            if pos == -1:
                violations.append(
                    f"content of child {child_name!r} is not a substring of its "
                    "parent's content (after whitespace normalization)"
                )
                continue
            span = (pos, pos + len(child_norm))
            for other in spans:
                if span[0] < other[1] and other[0] < span[1]:
                    violations.append(
                        f"children of {node['name']!r} overlap; child contents must be disjoint"
                    )
                    break
            spans.append(span)
            cursor = max(cursor, span[1])
    return violations


def decompose(
    nodes: dict[str, TextNode],
    node_name: str,
    gw: Gateway,
    cfg: RunConfig,
    warnings: list[str] | None = None,
) -> None:
    """Expand one node into its semantic sub-hierarchy via the model.

    The model returns the whole subtree for the node in one structured
    response (levels are relative, the section root at level 1); it is
    grafted after schema and traceability validation. Nodes already at the
    maximum depth are never queried.
    """
    node = nodes[node_name]
    if node.level >= cfg.max_depth:
        return

    def validator(value: object) -> list[str]:
        violations = _subtree_schema_violations(value, node.level, cfg.max_depth)
        if violations:
            return violations
        return _traceability_violations(value)  # type: ignore[arg-type]

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.SECTION_DAG_GENERATION,
        user_parts=[
            TextPart(f"Section Name: {node.name}\n\nFull Markdown Content:\n{node.content}")
        ],
        stage_tag="dag_decompose",
        temperature=cfg.temperature("dag_decompose"),
        max_output_tokens=16384,
    )
    try:
        value = gw.complete_validated(request, validator)
    except ValidationExhausted as exc:
        if any("substring" in v or "disjoint" in v or "empty content" in v for v in exc.violations):
            raise HallucinationError(
                f"decomposition of '{node_name}' is not traceable to the source: "
                + "; ".join(exc.violations)
            ) from exc
        raise SchemaError(
            f"decomposition of '{node_name}' violates the node schema: "
            + "; ".join(exc.violations)
        ) from exc

    by_name = {n["name"]: n for n in value["nodes"]}
    resp_root = next(n for n in value["nodes"] if n["level"] == 1)

    def graft(parent: TextNode, resp_node: dict) -> None:
        for child_name in resp_node["edge"]:
            resp_child = by_name[child_name]
            stored = _unique_name(str(resp_child["name"]), set(nodes))
            if stored != resp_child["name"] and warnings is not None:
                warnings.append(f"duplicate node name '{resp_child['name']}' stored as '{stored}'")
            child = TextNode(
                name=stored,
                content=single_line(resp_child["content"]),
                level=parent.level + 1,
            )
            nodes[stored] = child
            parent.edge.append(stored)
            graft(child, resp_child)

    graft(node, resp_root)


# --- visual nodes -----------------------------------------------------------

def _formula_heuristic(rel: str, width: int, height: int, markdown: str) -> bool:
    """Wide short strips with no figure/table token nearby are formulas."""
    if height <= 0 or width / height <= 4:
        return False
    lines = markdown.splitlines()
    for i, line in enumerate(lines):
        if rel in line:
            context = " ".join(lines[max(0, i - 2) : i + 3]).lower()
            return not re.search(r"\b(figure|fig\.?|table|tab\.?)\b", context)
    return True


def build_visual_nodes(
    bundle: PaperBundle,
    markdown: str,
    gw: Gateway | None,
    cfg: RunConfig,
    warnings: list[str] | None = None,
) -> list[VisualNode]:
    """One visual node per inventory image, in inventory order.

    Captions come from the model (copied verbatim when the document has
    one); if the model is unreachable, a plain Figure/Equation caption is
    synthesized from the formula heuristic.
    """
    if not bundle.images:
        return []
    refs = [f"![]({rel})" for rel, _, _ in bundle.images]

    def fallback() -> list[VisualNode]:
        out = []
        for (rel, width, height), ref in zip(bundle.images, refs):
            is_formula = _formula_heuristic(rel, width, height, markdown)
            out.append(
                VisualNode(
                    name=ref,
                    caption="Equation" if is_formula else "Figure",
                    is_formula=is_formula,
                    resolution=(width, height),
                )
            )
        return out

    if gw is None:
        return fallback()

    def validator(value: object) -> list[str]:
        if not isinstance(value, dict) or not isinstance(value.get("nodes"), list):
            return ["output must be an object with a 'nodes' list"]
        nodes = value["nodes"]
        if len(nodes) != len(refs):
            return [f"expected {len(refs)} visual nodes (one per image), got {len(nodes)}"]
        violations = []
        for i, (node, ref) in enumerate(zip(nodes, refs)):
            if not isinstance(node, dict):
                violations.append(f"nodes[{i}] is not an object")
                continue
            if node.get("name") != ref:
                violations.append(
                    f"nodes[{i}].name must be {ref!r} (do not reorder or remove images)"
                )
            if node.get("visual_node") != 1:
                violations.append(f"nodes[{i}].visual_node must be 1")
            if node.get("formula") not in (0, 1):
                violations.append(f"nodes[{i}].formula must be 0 or 1")
            if not isinstance(node.get("caption"), str):
                violations.append(f"nodes[{i}].caption must be a string")
        return violations

    request = ChatRequest(
        model=cfg.vlm,
        system=prompts.VISUAL_DAG,
        user_parts=[
            TextPart(
                "Image references:\n"
                + "\n".join(refs)
                + "\n\nFull Markdown text:\n"
                + markdown
            )
        ],
        stage_tag="dag_visual",
        temperature=cfg.temperature("dag_visual"),
        max_output_tokens=8192,
    )
    try:
        value = gw.complete_validated(request, validator)
    except TransportError as exc:
        if warnings is not None:
            warnings.append(f"visual model unavailable, using heuristic captions: {exc}")
        return fallback()
    except ValidationExhausted as exc:
        raise SchemaError(
            "visual node construction violates the schema: " + "; ".join(exc.violations)
        ) from exc

    out = []
    for (rel, width, height), node in zip(bundle.images, value["nodes"]):
        out.append(
            VisualNode(
                name=f"![]({rel})",
                caption=str(node["caption"]),
                is_formula=bool(node["formula"]),
                resolution=(width, height),
            )
        )
    return out


# --- cross-modal alignment --------------------------------------------------

def _caption_reference(visual: VisualNode, warnings: list[str] | None) -> tuple[str, str] | None:
    """(reference class, number) parsed from the caption, if any."""
    match = CAPTION_NUMBER_RE.search(visual.caption)
    if match:
        return _REF_CLASS[match.group(1).lower()], match.group(2)
    roman = ROMAN_CAPTION_RE.search(visual.caption)
    if roman and warnings is not None:
        warnings.append(
            f"caption of {visual.name} uses a Roman numeral "
            f"({roman.group(0).strip()}); numeric matching unsupported"
        )
    return None


def align(
    nodes: dict[str, TextNode],
    visuals: list[VisualNode],
    warnings: list[str] | None = None,
) -> list[tuple[str, str]]:
    """Deterministic reference detection between text nodes and visuals.

    A node matches a visual when it embeds the image markdown verbatim or
    names it by class and number (e.g. "Figure 3" against a caption
    "Figure 3: ..."). Edges attach at the deepest matching nodes only.
    """
    descendants: dict[str, set[str]] = {}

    def collect(name: str) -> set[str]:
        if name in descendants:
            return descendants[name]
        acc: set[str] = set()
        for child in nodes[name].edge:
            acc.add(child)
            acc |= collect(child)
        descendants[name] = acc
        return acc

    for name in nodes:
        collect(name)

    matched_by_visual: dict[str, list[str]] = {}
    for visual in visuals:
        ref = _caption_reference(visual, warnings)
        pattern = None
        if ref is not None:
            cls, number = ref
            pattern = re.compile(
                rf"\b{_CLASS_TOKENS[cls]}\s*\(?{number}\)?(?!\d)", re.IGNORECASE
            )
        hits = []
        for name, node in nodes.items():
            if visual.name in node.content or (pattern and pattern.search(node.content)):
                hits.append(name)
        deepest = [h for h in hits if not (descendants[h] & set(hits))]
        if deepest:
            matched_by_visual[visual.name] = deepest
        elif warnings is not None:
            warnings.append(f"visual {visual.name} is referenced by no text node")

    order = {v.name: i for i, v in enumerate(visuals)}
    edges: list[tuple[str, str]] = []
    for name in nodes:  # document order
        for vis_name in sorted(matched_by_visual, key=order.get):  # type: ignore[arg-type]
            if name in matched_by_visual[vis_name]:
                edges.append((name, vis_name))
    return edges


# --- full build -------------------------------------------------------------

def build(bundle_dir: str | Path, cfg: RunConfig, gw: Gateway) -> ScholarDag:
    """Run the whole construction pipeline and persist dag.json + build.log."""
    warnings: list[str] = []
    bundle = ingest(bundle_dir, cfg.metadata_overrides)
    cleaned = clean(bundle.markdown, gw, cfg)
    sections = split_sections(cleaned, gw, cfg)
    nodes = init_graph(bundle, sections, gw, cfg, warnings)
    root_name = next(iter(nodes))
    for section_name in list(nodes[root_name].edge):
        decompose(nodes, section_name, gw, cfg, warnings)
    visuals = build_visual_nodes(bundle, bundle.markdown, gw, cfg, warnings)
    edges = align(nodes, visuals, warnings)

    dag = ScholarDag(
        root=root_name,
        text_nodes=nodes,
        visual_nodes={v.name: v for v in visuals},
        cross_edges=edges,
    )
    violations = validate(dag, cfg.max_depth)
    if violations:
        raise InvalidDag(violations)

    out_dir = cfg.resolved_out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "dag.json").write_bytes(serialize(dag))
    (out_dir / "build.log").write_text(
        "".join(f"{w}\n" for w in warnings), encoding="utf-8"
    )
    for warning in warnings:
        log.warning("%s", warning)
    return dag


def selected_payload(dag: ScholarDag, name: str) -> str:
    """JSON for one node as the prompts expect it (visuals embedded)."""
    return json.dumps(node_payload(dag, name), ensure_ascii=False, indent=2)
