"""Slide deck backend: outlines, template selection, assembly, refinement.

A slide is a layout tree instantiated from one of the 23 library templates
(21 content layouts plus the title and contents slides). The refinement
loop alternates a mechanical lint audit (optionally merged with a visual
model audit over a rendered screenshot) with a model-side reviser that may
only touch flex ratios, typography, content, and headings.
"""

from __future__ import annotations

import copy
import html as html_lib
import json
import logging
import re
import shutil
from dataclasses import dataclass, field
from html.parser import HTMLParser
from importlib import resources
from pathlib import Path

from .config import RunConfig
from .dag import ScholarDag, TraversalBudget, VisualNode, bfs_select
from .errors import (
    ReportParseError,
    TemplateMissing,
    TopologyViolation,
    ValidationExhausted,
)
from .gateway import ChatRequest, Gateway, ImagePart, TextPart
from .measure import Box, Typography, render_html, text_height
from .paper2dag import selected_payload
from . import prompts

log = logging.getLogger(__name__)

CANVAS_W, CANVAS_H = 1280, 720
PADDING = 24
GAP = 16
HEADING_H = 78
TEXT_PAD = 12

FONT_MIN, FONT_MAX = 16.0, 24.0
LINE_HEIGHT_MAX = 1.5
WORD_TARGET, WORD_TOLERANCE = 50, 20

ACTIONS = ("RESIZE", "REWRITE", "ADD_CONTENT", "REWRITE_SHORTEN", "TYPOGRAPHY", "MODIFY_TITLE")
ALLOWED_TAGS = {"ul", "li", "p", "b", "br"}
FORBIDDEN_OPENERS = ("this slide introduces", "in this section")

CONTENT_TEMPLATES = (
    "T1_TextOnly.html",
    "T2_ImageRight.html",
    "T3_ImageLeft.html",
    "T4_ImageTop.html",
    "T5_TwoImages.html",
    "T6_TwoImages2.html",
    "T7_2x2_TopImage.html",
    "T8_2x2_BottomImage.html",
    "T9_2x2_AltTextImg.html",
    "T10_4Img_2x2Grid.html",
    "T11_3Img_TopTextBottom.html",
    "T12_3Img_BottomTextTop.html",
    "T13_3Img.html",
    "T14_ImageRight_1Formula.html",
    "T15_ImageLeft_1Formula.html",
    "T16_1Img_2Formula_TopTextBottom.html",
    "T17_2Img_1Formula_TopTextBottom.html",
    "T18_2Formula_TopTextBottom.html",
    "T19_2Text.html",
    "T20_FormulaTop.html",
    "T21_3Img_col.html",
)
INIT_TEMPLATES = ("Title Slide.html", "Contents.html")
KNOWN_TEMPLATES = set(CONTENT_TEMPLATES) | set(INIT_TEMPLATES)

NUMBER_PREFIX_RE = re.compile(r"^\s*\d+[\s.\-:]+\s*")
TAG_RE = re.compile(r"</?([a-zA-Z0-9]+)(?:\s[^>]*)?/?>")
ENTITY_ESCAPES = ("&lt;", "&gt;", "&amp;")


def strip_number_prefix(name: str) -> str:
    return NUMBER_PREFIX_RE.sub("", name).strip()


# --- outline ------------------------------------------------------------------

@dataclass
class SlideOutline:
    text: str
    figures: list[VisualNode] = field(default_factory=list)
    formulas: list[VisualNode] = field(default_factory=list)
    template: str | None = None

    def payload(self) -> dict:
        def vis(v: VisualNode) -> dict:
            return {
                "name": v.name,
                "caption": v.caption,
                "resolution": f"{v.resolution[0]}x{v.resolution[1]}",
            }

        return {
            "text": self.text,
            "figure": [vis(v) for v in self.figures],
            "formula": [vis(v) for v in self.formulas],
            "template": self.template,
        }


# --- layout tree ----------------------------------------------------------------

@dataclass
class LayoutNode:
    kind: str  # "container" | "text" | "image"
    flex: float = 1.0
    direction: str = "column"
    slot: str = ""
    role: str = "body"  # text nodes: "body" or "display"
    align: str = "left"
    font_size_pt: float = 18.0
    line_height: float = 1.3
    content: str = ""
    image: str = ""  # visual markdown reference
    src: str = ""  # relative image path
    heading: str | None = None
    children: list["LayoutNode"] = field(default_factory=list)

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()

    def text_leaves(self) -> list["LayoutNode"]:
        return [n for n in self.walk() if n.kind == "text"]

    def image_leaves(self) -> list["LayoutNode"]:
        return [n for n in self.walk() if n.kind == "image"]


def tree_to_wire(node: LayoutNode) -> dict:
    out: dict = {"kind": node.kind, "flex": node.flex}
    if node.heading is not None:
        out["heading"] = node.heading
    if node.slot:
        out["slot"] = node.slot
    if node.kind == "container":
        out["direction"] = node.direction
        out["children"] = [tree_to_wire(c) for c in node.children]
    elif node.kind == "text":
        out["typography"] = {"font-size": node.font_size_pt, "line-height": node.line_height}
        out["content"] = node.content
        out["role"] = node.role
    else:
        out["image"] = node.image
        out["src"] = node.src
    return out


def topology_signature(node: LayoutNode) -> tuple:
    if node.kind == "container":
        return ("container", node.direction, tuple(topology_signature(c) for c in node.children))
    if node.kind == "text":
        return ("text", node.slot)
    return ("image", node.image)


def _wire_signature(obj: dict) -> tuple | None:
    if not isinstance(obj, dict):
        return None
    kind = obj.get("kind")
    if kind == "container":
        children = obj.get("children")
        if not isinstance(children, list):
            return None
        sigs = tuple(_wire_signature(c) for c in children)
        if any(s is None for s in sigs):
            return None
        return ("container", obj.get("direction"), sigs)
    if kind == "text":
        return ("text",)
    if kind == "image":
        return ("image", obj.get("image"))
    return None


def content_violations(content: str) -> list[str]:
    violations = []
    for escape in ENTITY_ESCAPES:
        if escape in content:
            violations.append(f"content contains the forbidden entity escape '{escape}'")
    for tag in TAG_RE.findall(content):
        if tag.lower() not in ALLOWED_TAGS:
            violations.append(f"content uses disallowed tag <{tag}>")
    return violations


def _match_topology(node: LayoutNode, obj: dict) -> bool:
    if node.kind == "container":
        children = obj.get("children", [])
        return (
            obj.get("kind") == "container"
            and obj.get("direction") == node.direction
            and len(children) == len(node.children)
            and all(_match_topology(c, o) for c, o in zip(node.children, children))
        )
    if node.kind == "text":
        return obj.get("kind") == "text"
    return obj.get("kind") == "image" and obj.get("image", node.image) == node.image


def wire_violations(obj: object, original: LayoutNode) -> list[str]:
    """Validate a revised layout tree in wire form against the original."""
    if not isinstance(obj, dict):
        return ["revised layout must be a JSON object"]
    if not _match_topology(original, obj):
        return [
            "topology violation: the container tree shape (and image bindings) "
            "must stay identical; only flex, typography, content, and heading may change"
        ]
    violations: list[str] = []

    def check(node: LayoutNode, wire: dict, path: str) -> None:
        flex = wire.get("flex", node.flex)
        if not isinstance(flex, (int, float)) or flex <= 0:
            violations.append(f"{path}: flex must be a positive number")
        if node.kind == "container":
            for i, (c, w) in enumerate(zip(node.children, wire.get("children", []))):
                check(c, w, f"{path}.children[{i}]")
        elif node.kind == "text":
            typo = wire.get("typography", {})
            size = typo.get("font-size", node.font_size_pt)
            lh = typo.get("line-height", node.line_height)
            if node.role == "body":
                if not FONT_MIN <= float(size) <= FONT_MAX:
                    violations.append(
                        f"{path}: body font-size must be within [{FONT_MIN:.0f}, {FONT_MAX:.0f}]pt, got {size}"
                    )
                if float(lh) > LINE_HEIGHT_MAX:
                    violations.append(f"{path}: line-height must be <= {LINE_HEIGHT_MAX}")
            content = wire.get("content", node.content)
            if not isinstance(content, str):
                violations.append(f"{path}: content must be a string")
            else:
                violations.extend(f"{path}: {v}" for v in content_violations(content))

    check(original, obj, "root")
    return violations


def apply_wire(original: LayoutNode, obj: dict) -> LayoutNode:
    """Copy the original tree, taking only the fields a reviser may change."""
    revised = copy.deepcopy(original)

    def take(node: LayoutNode, wire: dict) -> None:
        node.flex = float(wire.get("flex", node.flex))
        if "heading" in wire and wire["heading"] is not None:
            node.heading = str(wire["heading"]) if node.heading is not None else node.heading
        if node.kind == "container":
            for c, w in zip(node.children, wire.get("children", [])):
                take(c, w)
        elif node.kind == "text":
            typo = wire.get("typography", {})
            node.font_size_pt = float(typo.get("font-size", node.font_size_pt))
            node.line_height = float(typo.get("line-height", node.line_height))
            node.content = str(wire.get("content", node.content))

    take(revised, obj)
    return revised


# --- template parsing ---------------------------------------------------------

class _TemplateParser(HTMLParser):
    def __init__(self) -> None:
        super().__init__()
        self.root: LayoutNode | None = None
        self._stack: list[LayoutNode] = []

    def handle_starttag(self, tag: str, attrs: list) -> None:
        if tag != "div":
            return
        a = dict(attrs)
        if "class" in a and "slide" in a["class"].split():
            node = LayoutNode(kind="container", direction="column")
            node.heading = "" if a.get("data-heading") == "true" else None
            self.root = node
            self._stack.append(node)
            return
        if not self._stack:
            return
        if "data-container" in a:
            node = LayoutNode(
                kind="container",
                direction=a["data-container"],
                flex=float(a.get("data-flex", 1)),
            )
            self._stack[-1].children.append(node)
            self._stack.append(node)
        elif "data-slot" in a:
            slot = a["data-slot"]
            kind = "image" if slot.startswith(("image", "formula")) else "text"
            node = LayoutNode(
                kind=kind,
                slot=slot,
                flex=float(a.get("data-flex", 1)),
                font_size_pt=float(a.get("data-font-size", 18)),
                line_height=float(a.get("data-line-height", 1.3)),
                role=a.get("data-role", "body"),
                align=a.get("data-align", "left"),
            )
            self._stack[-1].children.append(node)
            self._stack.append(node)

    def handle_endtag(self, tag: str) -> None:
        if tag == "div" and self._stack:
            self._stack.pop()


def default_template_dir() -> Path:
    return Path(str(resources.files("paperx") / "templates"))


def parse_template(name: str, template_dir: Path | None = None) -> LayoutNode:
    directory = template_dir or default_template_dir()
    path = directory / name
    if not path.exists():
        raise TemplateMissing(f"template '{name}' not found in {directory}")
    parser = _TemplateParser()
    parser.feed(path.read_text(encoding="utf-8"))
    if parser.root is None:
        raise TemplateMissing(f"template '{name}' has no slide container")
    return parser.root


# --- geometry -----------------------------------------------------------------

def compute_boxes(tree: LayoutNode) -> dict[int, Box]:
    """Pixel box per node id under the fixed flex model on the slide canvas."""
    boxes: dict[int, Box] = {}

    def place(node: LayoutNode, box: Box) -> None:
        boxes[id(node)] = box
        if node.kind != "container" or not node.children:
            return
        total = sum(c.flex for c in node.children) or 1.0
        gaps = GAP * (len(node.children) - 1)
        if node.direction == "row":
            avail = max(box.width - gaps, 1.0)
            x = box.x
            for c in node.children:
                w = avail * c.flex / total
                place(c, Box(x, box.y, max(w, 1.0), box.height))
                x += w + GAP
        else:
            avail = max(box.height - gaps, 1.0)
            y = box.y
            for c in node.children:
                h = avail * c.flex / total
                place(c, Box(box.x, y, box.width, max(h, 1.0)))
                y += h + GAP

    inner = Box(
        PADDING,
        PADDING + (HEADING_H if tree.heading is not None else 0),
        CANVAS_W - 2 * PADDING,
        CANVAS_H - 2 * PADDING - (HEADING_H if tree.heading is not None else 0),
    )
    place(tree, inner)
    return boxes


def strip_tags(content: str) -> str:
    return " ".join(TAG_RE.sub(" ", content).split())


def content_blocks(content: str) -> list[str]:
    """Visual line blocks of restricted-tag HTML (list items, paragraphs)."""
    pieces = re.split(r"</li>|</p>|<br\s*/?>", content)
    blocks = [strip_tags(p) for p in pieces]
    return [b for b in blocks if b]


def text_block_height(node: LayoutNode, box: Box) -> float:
    width = max(box.width - 2 * TEXT_PAD, 1.0)
    typo = Typography(font_size_pt=node.font_size_pt, line_height=max(node.line_height, 1.0))
    return sum(text_height(block, width, typo) for block in content_blocks(node.content))


def slide_overflows(tree: LayoutNode) -> list[str]:
    """Slots whose text exceeds its box under the metrics model."""
    boxes = compute_boxes(tree)
    overfull = []
    for node in tree.text_leaves():
        box = boxes[id(node)]
        if text_block_height(node, box) > box.height - 2 * TEXT_PAD:
            overfull.append(node.slot or "text")
    return overfull


# --- audit / revise -------------------------------------------------------------

@dataclass
class Instruction:
    target: str
    action: str
    detail: str


@dataclass
class AuditReport:
    status: str  # "PASS" | "NEEDS_REVISION"
    reason: str
    instructions: list[Instruction] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.status == "PASS" and self.instructions:
            raise ValueError("a PASS report must carry no instructions")

    def payload(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "instructions": [
                {"target": i.target, "action": i.action, "detail": i.detail}
                for i in self.instructions
            ],
        }


def lint_audit(tree: LayoutNode, outline: SlideOutline, template: str) -> AuditReport:
    """Mechanical checks: typography bounds, escapes, overflow, word budget."""
    instructions: list[Instruction] = []
    for node in tree.text_leaves():
        label = node.slot or "text"
        if node.role == "body":
            if node.font_size_pt < FONT_MIN:
                instructions.append(
                    Instruction(label, "TYPOGRAPHY", f"Font is {node.font_size_pt:g}pt; increase font-size to {FONT_MIN:g}pt.")
                )
            elif node.font_size_pt > FONT_MAX:
                instructions.append(
                    Instruction(label, "TYPOGRAPHY", f"Font is {node.font_size_pt:g}pt; reduce font-size to {FONT_MAX:g}pt.")
                )
            if node.line_height > LINE_HEIGHT_MAX:
                instructions.append(
                    Instruction(label, "TYPOGRAPHY", f"Line-height is {node.line_height:g}; reduce it to {LINE_HEIGHT_MAX}.")
                )
        if any(escape in node.content for escape in ENTITY_ESCAPES):
            instructions.append(
                Instruction(label, "REWRITE", "Content contains HTML entity escapes; rewrite it with raw < and > tags only.")
            )

    flagged = {i.target for i in instructions if i.action == "TYPOGRAPHY"}
    for slot in slide_overflows(tree):
        node = next((n for n in tree.text_leaves() if (n.slot or "text") == slot), None)
        if node is not None and node.font_size_pt > FONT_MIN:
            if slot not in flagged:
                instructions.append(
                    Instruction(slot, "TYPOGRAPHY", f"Text overflows its container; reduce font-size toward {FONT_MIN:g}pt.")
                )
        else:
            instructions.append(
                Instruction(slot, "REWRITE_SHORTEN", "Text still overflows at the minimum font size; shorten it to fit.")
            )

    if template in CONTENT_TEMPLATES and not tree.image_leaves():
        words = sum(len(strip_tags(n.content).split()) for n in tree.text_leaves() if n.role == "body")
        outline_words = len(outline.text.split())
        if words > WORD_TARGET + WORD_TOLERANCE:
            instructions.append(
                Instruction(
                    "text", "REWRITE",
                    f"Pure text slide has {words} words; summarize the outline content to approximately {WORD_TARGET} words.",
                )
            )
        elif words < WORD_TARGET - WORD_TOLERANCE and outline_words >= WORD_TARGET - WORD_TOLERANCE:
            instructions.append(
                Instruction(
                    "text", "ADD_CONTENT",
                    f"Pure text slide has only {words} words; add supporting points from the outline up to about {WORD_TARGET} words.",
                )
            )

    if instructions:
        return AuditReport("NEEDS_REVISION", "mechanical lint found violations", instructions)
    return AuditReport("PASS", "lint checks satisfied")


_STATUS_RE = re.compile(r"Status:\s*\[?\s*(PASS|NEEDS_REVISION)", re.IGNORECASE)
_REASON_RE = re.compile(r"Reason:\s*(.+)")
_INSTR_RE = re.compile(
    r"-\s*\[TARGET:\s*(.*?)\]\s*->\s*\[ACTION:\s*([A-Z_]+)\]\s*->\s*\[DETAIL:\s*(.*?)\]\s*$",
    re.MULTILINE,
)


def parse_audit_report(text: str) -> AuditReport:
    status_m = _STATUS_RE.search(text)
    if not status_m:
        raise ReportParseError("audit report lacks a 'Status:' line")
    status = status_m.group(1).upper()
    reason_m = _REASON_RE.search(text)
    reason = reason_m.group(1).strip() if reason_m else ""
    instructions = [
        Instruction(t.strip(), a.strip(), d.strip()) for t, a, d in _INSTR_RE.findall(text)
    ]
    bad = [i.action for i in instructions if i.action not in ACTIONS]
    if bad:
        raise ReportParseError(f"audit report uses unknown actions: {bad}")
    if status == "PASS":
        instructions = []
    elif not instructions:
        raise ReportParseError("NEEDS_REVISION report carries no instructions")
    return AuditReport(status, reason, instructions)


def vlm_audit(
    tree: LayoutNode,
    outline: SlideOutline,
    history: list[AuditReport],
    gw: Gateway,
    cfg: RunConfig,
) -> AuditReport:
    """Render the slide and ask the visual auditor for a two-part report."""
    import tempfile

    png = render_html(render_slide_html(tree), CANVAS_W, CANVAS_H, cfg.renderer_cmd)
    with tempfile.NamedTemporaryFile(suffix=".png", delete=False) as fh:
        fh.write(png)
        png_path = fh.name
    history_text = json.dumps([h.payload() for h in history], ensure_ascii=False, indent=2)
    request = ChatRequest(
        model=cfg.vlm,
        system=prompts.COMMENTER,
        user_parts=[
            TextPart(
                "PPT Outline:\n"
                + json.dumps(outline.payload(), ensure_ascii=False, indent=2)
                + "\n\nHistorical evaluations:\n"
                + history_text
                + "\n\nThe current slide rendering follows."
            ),
            ImagePart(png_path),
        ],
        stage_tag="ppt_audit",
        temperature=cfg.temperature("ppt_audit"),
    )

    def validator(value: object) -> list[str]:
        try:
            parse_audit_report(str(value))
        except ReportParseError as exc:
            return [str(exc)]
        return []

    try:
        text = str(gw.complete_validated(request, validator, extractor=lambda t: t))
    except ValidationExhausted as exc:
        raise ReportParseError(
            "auditor never produced a parseable report: " + "; ".join(exc.violations)
        ) from exc
    finally:
        Path(png_path).unlink(missing_ok=True)
    return parse_audit_report(text)


def audit(
    tree: LayoutNode,
    outline: SlideOutline,
    history: list[AuditReport],
    template: str,
    gw: Gateway | None,
    cfg: RunConfig,
) -> AuditReport:
    """Lint always runs; a visual audit, when enabled, is merged with it."""
    report = lint_audit(tree, outline, template)
    if not (cfg.use_vlm_audit and cfg.renderer_cmd and gw is not None):
        return report
    visual = vlm_audit(tree, outline, history, gw, cfg)
    if report.status == "PASS" and visual.status == "PASS":
        return AuditReport("PASS", f"lint clean; auditor: {visual.reason}")
    instructions = report.instructions + [
        i for i in visual.instructions if i not in report.instructions
    ]
    reasons = "; ".join(r for r in (report.reason, visual.reason) if r)
    return AuditReport("NEEDS_REVISION", reasons, instructions)


def revise(
    tree: LayoutNode,
    report: AuditReport,
    outline: SlideOutline,
    gw: Gateway,
    cfg: RunConfig,
) -> LayoutNode:
    """Apply auditor instructions through the reviser model, validated."""
    if report.status != "NEEDS_REVISION":
        raise ValueError("revise requires a NEEDS_REVISION report")
    instructions_text = "\n".join(
        f"- [TARGET: {i.target}] -> [ACTION: {i.action}] -> [DETAIL: {i.detail}]"
        for i in report.instructions
    )
    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.REVISER,
        user_parts=[
            TextPart(
                "Auditor Instructions:\n"
                + instructions_text
                + "\n\nOriginal Layout Tree (JSON):\n"
                + json.dumps(tree_to_wire(tree), ensure_ascii=False, indent=2)
                + "\n\nPPT Outline:\n"
                + json.dumps(outline.payload(), ensure_ascii=False, indent=2)
            )
        ],
        stage_tag="ppt_revise",
        temperature=cfg.temperature("ppt_revise"),
        max_output_tokens=8192,
    )
    try:
        value = gw.complete_validated(request, lambda v: wire_violations(v, tree))
    except ValidationExhausted as exc:
        if any("topology" in v for v in exc.violations):
            raise TopologyViolation(
                "reviser kept changing the layout topology: " + "; ".join(exc.violations)
            ) from exc
        raise
    return apply_wire(tree, value)


def refine_loop(
    tree: LayoutNode,
    outline: SlideOutline,
    template: str,
    gw: Gateway | None,
    cfg: RunConfig,
    warnings: list[str] | None = None,
) -> tuple[LayoutNode, list[AuditReport]]:
    """Audit/revise alternation, at most ``cfg.refine_iters`` audits."""
    history: list[AuditReport] = []
    for k in range(1, cfg.refine_iters + 1):
        report = audit(tree, outline, history, template, gw, cfg)
        history.append(report)
        if report.status == "PASS":
            break
        if k < cfg.refine_iters and gw is not None:
            tree = revise(tree, report, outline, gw, cfg)
    if history and history[-1].status != "PASS" and warnings is not None:
        warnings.append(
            f"refinement budget ({cfg.refine_iters}) exhausted without a PASS; "
            "keeping the last revision"
        )
    return tree, history

# --- outline generation ---------------------------------------------------------

def init_outline(dag: ScholarDag, warnings: list[str] | None = None) -> list[SlideOutline]:
    """Title and contents slides, fully determined by the root node."""
    root = dag.text_nodes[dag.root]
    authors = root.content.split(" | ")[0] if root.content else ""
    title_slide = SlideOutline(
        text=f"{root.name}\n{authors}".rstrip(), template="Title Slide.html"
    )
    entries = [strip_number_prefix(name) for name in root.edge]
    if not entries and warnings is not None:
        warnings.append("root node has no sections; contents slide will be empty")
    contents = SlideOutline(text=",\n".join(entries), template="Contents.html")
    return [title_slide, contents]


def gen_slide_outline(
    dag: ScholarDag, node_name: str, gw: Gateway, cfg: RunConfig
) -> SlideOutline:
    """Model-side summary for one node; visuals routed by their formula flag."""
    aligned = {v.name: v for v in dag.visuals_for(node_name)}

    def validator(value: object) -> list[str]:
        if not isinstance(value, dict):
            return ["output must be a single JSON object"]
        violations = []
        for key in ("text", "figure", "formula", "template"):
            if key not in value:
                violations.append(f"missing key '{key}'")
        if violations:
            return violations
        if value["template"] is not None:
            violations.append("template must be null")
        text = str(value.get("text", ""))
        if not text.strip():
            violations.append("text must be a non-empty summary")
        lowered = text.strip().lower()
        for opener in FORBIDDEN_OPENERS:
            if lowered.startswith(opener):
                violations.append(f'text must not start with "{opener}"')
        for list_name, want_formula in (("figure", False), ("formula", True)):
            items = value.get(list_name)
            if not isinstance(items, list):
                violations.append(f"'{list_name}' must be a list")
                continue
            for item in items:
                name = item.get("name") if isinstance(item, dict) else None
                vis = aligned.get(name)
                if vis is None:
                    violations.append(
                        f"'{list_name}' lists {name!r}, which is not a visual aligned "
                        "with this node (do not invent images)"
                    )
                elif vis.is_formula != want_formula:
                    violations.append(
                        f"{name!r} has formula == {int(vis.is_formula)} and belongs in "
                        f"the {'formula' if vis.is_formula else 'figure'} list"
                    )
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.GENERATE_COMPLETE_OUTLINE,
        user_parts=[TextPart("selected_node:\n" + selected_payload(dag, node_name))],
        stage_tag="ppt_outline",
        temperature=cfg.temperature("ppt_outline"),
    )
    value = gw.complete_validated(request, validator)
    figures = [aligned[item["name"]] for item in value["figure"]]
    formulas = [aligned[item["name"]] for item in value["formula"]]
    return SlideOutline(text=str(value["text"]).strip(), figures=figures, formulas=formulas)


# --- template selection -----------------------------------------------------------

def orientation_of(visual: VisualNode) -> str:
    """wide / tall / square with a 1.2 aspect-ratio threshold."""
    w, h = visual.resolution
    if w > 1.2 * h:
        return "wide"
    if h > 1.2 * w:
        return "tall"
    return "square"


def classify_template(
    n_figures: int, n_formulas: int, orientation: str, has_text: bool
) -> str:
    """Deterministic total mapping from outline shape to a template filename.

    Covers every cell of (figures 0-4) x (formulas 0-2) x orientation x
    text presence; larger counts clamp to the nearest cell, except that
    three or more formulas route to the three-formula stack.
    """
    if n_formulas >= 3:
        return "T11_3Img_TopTextBottom.html"
    figures = min(max(n_figures, 0), 4)
    formulas = min(max(n_formulas, 0), 2)
    if formulas == 0:
        if figures == 0:
            return "T1_TextOnly.html"
        if figures == 1:
            return "T2_ImageRight.html" if has_text else "T4_ImageTop.html"
        if figures == 2:
            if not has_text:
                return "T5_TwoImages.html"
            return {
                "wide": "T6_TwoImages2.html",
                "tall": "T9_2x2_AltTextImg.html",
                "square": "T7_2x2_TopImage.html",
            }[orientation]
        if figures == 3:
            if orientation == "wide":
                return "T21_3Img_col.html"
            return "T12_3Img_BottomTextTop.html" if has_text else "T13_3Img.html"
        return "T10_4Img_2x2Grid.html"
    if formulas == 1:
        if figures == 0:
            return "T20_FormulaTop.html"
        if figures == 1:
            return "T14_ImageRight_1Formula.html"
        return "T17_2Img_1Formula_TopTextBottom.html"
    if figures == 0:
        return "T18_2Formula_TopTextBottom.html"
    return "T16_1Img_2Formula_TopTextBottom.html"


def fallback_template(outline: SlideOutline) -> str:
    first = outline.figures[0] if outline.figures else (
        outline.formulas[0] if outline.formulas else None
    )
    orientation = orientation_of(first) if first is not None else "square"
    return classify_template(
        len(outline.figures), len(outline.formulas), orientation, bool(outline.text.strip())
    )


def select_template(outline: SlideOutline, gw: Gateway | None, cfg: RunConfig) -> str:
    """Ask the model to pick one of the 21 content templates.

    The rule classifier doubles as the no-model fallback; the model's
    answer is only accepted if it names a known content template.
    """
    if outline.template is not None:
        return outline.template
    if gw is None or not cfg.llm_template_select:
        return fallback_template(outline)

    def validator(value: object) -> list[str]:
        if not isinstance(value, dict) or "template" not in value:
            return ['output must be {"template": "<filename>"}']
        if value["template"] not in CONTENT_TEMPLATES:
            return [f"{value['template']!r} is not one of the 21 template filenames"]
        return []

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.ARRANGE_TEMPLATE,
        user_parts=[TextPart(json.dumps([outline.payload()], ensure_ascii=False, indent=2))],
        stage_tag="ppt_slide",
        temperature=cfg.temperature("ppt_slide"),
    )
    value = gw.complete_validated(request, validator)
    return str(value["template"])


# --- assembly -----------------------------------------------------------------

def sanitize_text(text: str) -> str:
    """Plain text safe to embed raw in restricted-tag HTML content."""
    return " ".join(text.replace("&", " and ").replace("<", "(").replace(">", ")").split())


def bulletize(text: str, max_items: int = 6) -> str:
    items: list[str] = []
    for line in text.splitlines():
        line = line.strip().rstrip(",")
        if not line:
            continue
        items.extend(s.strip() for s in re.split(r"(?<=[.!?])\s+", line) if s.strip())
    items = [sanitize_text(i) for i in items if i][:max_items]
    if not items:
        return ""
    if len(items) == 1:
        return f"<p>{items[0]}</p>"
    return "<ul>" + "".join(f"<li>{i}</li>" for i in items) + "</ul>"


def assemble(
    outline: SlideOutline,
    template: str,
    heading: str = "",
    template_dir: Path | None = None,
    warnings: list[str] | None = None,
) -> tuple[LayoutNode, str]:
    """Instantiate a template with the outline; returns (tree, slide HTML)."""
    tree = parse_template(template, template_dir)
    if tree.heading is not None:
        tree.heading = heading

    image_slots = sorted(
        (n for n in tree.image_leaves() if n.slot.startswith("image")), key=lambda n: n.slot
    )
    formula_slots = sorted(
        (n for n in tree.image_leaves() if n.slot.startswith("formula")), key=lambda n: n.slot
    )
    for slots, visuals, label in (
        (image_slots, outline.figures, "image"),
        (formula_slots, outline.formulas, "formula"),
    ):
        for slot_node, visual in zip(slots, visuals):
            slot_node.image = visual.name
            slot_node.src = visual.path
        if len(visuals) > len(slots) and warnings is not None:
            warnings.append(
                f"slot mismatch in {template}: {len(visuals)} {label}s for "
                f"{len(slots)} slots; extras dropped"
            )
        if len(slots) > len(visuals):
            if warnings is not None and visuals:
                warnings.append(
                    f"slot mismatch in {template}: only {len(visuals)} {label}s for "
                    f"{len(slots)} slots; empty slots collapsed"
                )
            for slot_node in slots[len(visuals):]:
                _collapse_slot(tree, slot_node)

    text_slots = [n for n in tree.text_leaves() if n.slot.startswith("text")]
    if template == "Title Slide.html":
        lines = outline.text.split("\n", 1)
        for node in tree.text_leaves():
            if node.slot == "title":
                node.content = f"<p>{sanitize_text(lines[0])}</p>"
            elif node.slot == "authors":
                node.content = f"<p>{sanitize_text(lines[1]) if len(lines) > 1 else ''}</p>"
    elif len(text_slots) >= 2:
        first, second = _split_bullets(outline.text)
        text_slots[0].content = first
        text_slots[1].content = second
    elif text_slots:
        text_slots[0].content = bulletize(outline.text)
    return tree, render_slide_html(tree)


def _collapse_slot(tree: LayoutNode, target: LayoutNode) -> None:
    """Remove an unfilled slot; empty ancestors collapse with it."""

    def prune(node: LayoutNode) -> bool:
        node.children = [c for c in node.children if not (c is target or prune(c))]
        return node.kind == "container" and not node.children and node is not tree

    prune(tree)


def _split_bullets(text: str) -> tuple[str, str]:
    items = [s.strip() for s in re.split(r"(?<=[.!?])\s+|\n", text) if s.strip()]
    items = [sanitize_text(i.rstrip(",")) for i in items][:8]
    if len(items) < 2:
        return bulletize(text), ""
    half = (len(items) + 1) // 2

    def ul(chunk: list[str]) -> str:
        return "<ul>" + "".join(f"<li>{i}</li>" for i in chunk) + "</ul>"

    return ul(items[:half]), ul(items[half:])


# --- HTML rendering -------------------------------------------------------------

_SLIDE_CSS = """\
html, body { margin: 0; padding: 0; }
.slide { position: relative; width: %(w)dpx; height: %(h)dpx; background: #ffffff;
         font-family: Helvetica, Arial, sans-serif; color: #1a1a2e; box-sizing: border-box;
         padding: %(pad)dpx; display: flex; flex-direction: column; overflow: hidden; }
.heading { height: %(head)dpx; flex: none; font-size: 30pt; font-weight: bold;
           color: #16325c; border-bottom: 3px solid #16325c; margin-bottom: 8px;
           display: flex; align-items: center; box-sizing: border-box; }
.node { box-sizing: border-box; min-width: 0; min-height: 0; }
.text { padding: %(tpad)dpx; overflow: hidden; }
.text ul { margin: 0; padding-left: 1.2em; }
.text p { margin: 0 0 0.4em 0; }
.image { display: flex; align-items: center; justify-content: center; overflow: hidden; }
.image img { max-width: 100%%; max-height: 100%%; object-fit: contain; }
""" % {"w": CANVAS_W, "h": CANVAS_H, "pad": PADDING, "head": HEADING_H - 8, "tpad": TEXT_PAD}


def _node_html(node: LayoutNode, indent: int) -> str:
    pad = "  " * indent
    if node.kind == "container":
        inner = "\n".join(_node_html(c, indent + 1) for c in node.children)
        style = f"display:flex;flex-direction:{node.direction};gap:{GAP}px;flex:{node.flex:g};"
        return f'{pad}<div class="node" style="{style}">\n{inner}\n{pad}</div>'
    if node.kind == "text":
        style = (
            f"flex:{node.flex:g};font-size:{node.font_size_pt:g}pt;"
            f"line-height:{node.line_height:g};"
        )
        if node.align == "center":
            style += "text-align:center;display:flex;flex-direction:column;justify-content:center;"
        if node.role == "display":
            style += "font-weight:bold;color:#16325c;"
        return f'{pad}<div class="node text" style="{style}">{node.content}</div>'
    if not node.src:
        return f'{pad}<div class="node image" style="flex:{node.flex:g};"></div>'
    alt = html_lib.escape(node.image, quote=True)
    return (
        f'{pad}<div class="node image" style="flex:{node.flex:g};">'
        f'<img src="{html_lib.escape(node.src, quote=True)}" alt="{alt}"></div>'
    )


def render_slide_html(tree: LayoutNode) -> str:
    heading_html = ""
    if tree.heading is not None and tree.heading:
        heading_html = f'  <div class="heading">{html_lib.escape(tree.heading)}</div>\n'
    body = "\n".join(_node_html(c, 1) for c in tree.children)
    return (
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        f"<style>\n{_SLIDE_CSS}</style>\n</head>\n<body>\n"
        f'<div class="slide">\n{heading_html}{body}\n</div>\n</body>\n</html>\n'
    )


# --- deck build / export ---------------------------------------------------------

@dataclass
class SlideRecord:
    heading: str
    outline: SlideOutline
    template: str
    tree: LayoutNode
    audits: list[AuditReport] = field(default_factory=list)


def build_deck(
    dag: ScholarDag,
    gw: Gateway | None,
    cfg: RunConfig,
    warnings: list[str] | None = None,
) -> list[SlideRecord]:
    """Plan, assemble, and refine every slide for the dag."""
    warnings = warnings if warnings is not None else []
    records: list[SlideRecord] = []

    for outline in init_outline(dag, warnings):
        heading = "Contents" if outline.template == "Contents.html" else ""
        tree, _ = assemble(outline, outline.template or "", heading, warnings=warnings)
        tree, audits = refine_loop(tree, outline, outline.template or "", gw, cfg, warnings)
        records.append(SlideRecord(heading, outline, outline.template or "", tree, audits))

    for name in bfs_select(dag, TraversalBudget(cfg.ppt_k)):
        if gw is not None:
            outline = gen_slide_outline(dag, name, gw, cfg)
        else:
            outline = SlideOutline(
                text=dag.text_nodes[name].content,
                figures=[v for v in dag.visuals_for(name) if not v.is_formula],
                formulas=[v for v in dag.visuals_for(name) if v.is_formula],
            )
        template = select_template(outline, gw, cfg)
        heading = strip_number_prefix(name)
        tree, _ = assemble(outline, template, heading, warnings=warnings)
        tree, audits = refine_loop(tree, outline, template, gw, cfg, warnings)
        records.append(SlideRecord(heading, outline, template, tree, audits))
    return records


def export_deck(
    deck: list[SlideRecord],
    out_dir: str | Path,
    bundle_dir: str | Path | None = None,
    renderer_cmd: str = "",
) -> list[Path]:
    """Write slides/NNN.html, deck.json, copied images, optional PNGs."""
    out = Path(out_dir)
    slides_dir = out / "slides"
    slides_dir.mkdir(parents=True, exist_ok=True)

    if bundle_dir is not None:
        _copy_referenced_images(deck, Path(bundle_dir), out)

    written: list[Path] = []
    for i, record in enumerate(deck, 1):
        for node in record.tree.image_leaves():
            if node.src:
                node.src = f"../{node.src}"
        html = render_slide_html(record.tree)
        for node in record.tree.image_leaves():
            if node.src.startswith("../"):
                node.src = node.src[3:]
        path = slides_dir / f"{i:03d}.html"
        path.write_text(html, encoding="utf-8")
        written.append(path)
        if renderer_cmd:
            png = render_html(html, CANVAS_W, CANVAS_H, renderer_cmd)
            (slides_dir / f"{i:03d}.png").write_bytes(png)

    doc = {
        "slides": [
            {
                "index": i,
                "heading": r.heading,
                "template": r.template,
                "outline": r.outline.payload(),
                "layout": tree_to_wire(r.tree),
                "audits": [a.payload() for a in r.audits],
            }
            for i, r in enumerate(deck, 1)
        ]
    }
    deck_path = out / "deck.json"
    deck_path.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    written.append(deck_path)
    return written


def _copy_referenced_images(deck: list[SlideRecord], bundle_dir: Path, out: Path) -> None:
    for record in deck:
        for node in record.tree.image_leaves():
            if not node.src:
                continue
            source = bundle_dir / node.src
            target = out / node.src
            if source.exists():
                target.parent.mkdir(parents=True, exist_ok=True)
                if not target.exists():
                    shutil.copyfile(source, target)
