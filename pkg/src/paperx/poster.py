"""Poster backend: section outlines, placement, and layout optimization.

Layout follows a text-first scheme: with every image pinned at its minimum
size, binary-search the largest overflow-free font on a 0.5pt grid, then
greedily grow images into the remaining space. Feasibility of a candidate
configuration is always judged by re-flowing all sections into the columns
under the shared text metrics model.
"""

from __future__ import annotations

import html as html_lib
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .dag import ScholarDag, TraversalBudget, VisualNode, bfs_select
from .errors import InfeasibleAtMinimum, ValidationExhausted
from .gateway import ChatRequest, Gateway, TextPart
from .measure import Box, Typography, text_height
from . import prompts

log = logging.getLogger(__name__)

MARGIN = 48
GUTTER = 32
HEADER_FRAC = 0.12
SECTION_GAP = 24
BLOCK_PAD = 18
IMAGE_GAP = 12
BAR_FONT_DELTA = 6.0  # section bar font = body font + delta
LINE_HEIGHT = 1.3

SCALE_STEP = 0.05
MAX_SUMMARY_WORDS = 40

SECTION_RE = re.compile(r"<section\s+class=\"section\"")
BAR_RE = re.compile(r"<div\s+class=\"section-bar\"[^>]*>(.*?)</div>", re.DOTALL)
BODY_RE = re.compile(r"<div\s+class=\"section-body\"", re.DOTALL)
IMG_SECTION_RE = re.compile(r"<div\s+class=\"img-section\"")
IMG_SRC_RE = re.compile(r"<img\s+[^>]*src=\"([^\"]+)\"")
PARA_RE = re.compile(r"<p>(.*?)</p>", re.DOTALL)


def sentence_count(text: str) -> int:
    return len([s for s in re.split(r"[.!?]+(?:\s+|$)", text) if s.strip()])


@dataclass
class PosterSection:
    title: str
    summary: str
    images: list[str] = field(default_factory=list)  # visual names, at most 2
    html_block: str = ""


@dataclass
class ImageSlot:
    section: int  # index into layout.sections
    name: str  # visual markdown reference
    src: str
    natural: tuple[int, int]
    scale: float


@dataclass
class PosterLayout:
    canvas: tuple[int, int]
    n_columns: int
    sections: list[PosterSection]
    images: list[ImageSlot]
    font_pt: float
    font_range: tuple[float, float]
    s_min: float
    header_title: str = ""
    header_authors: str = ""
    header: Box = field(default=None)  # type: ignore[assignment]
    columns: list[Box] = field(default_factory=list)
    assignment: list[tuple[int, int, float, float]] = field(default_factory=list)
    # assignment rows: (section index, column index, y, block height)

    def __post_init__(self) -> None:
        width, height = self.canvas
        header_h = height * HEADER_FRAC
        self.header = Box(MARGIN, MARGIN, width - 2 * MARGIN, header_h)
        col_top = MARGIN + header_h + GUTTER
        col_h = height - col_top - MARGIN
        col_w = (width - 2 * MARGIN - (self.n_columns - 1) * GUTTER) / self.n_columns
        self.columns = [
            Box(MARGIN + i * (col_w + GUTTER), col_top, col_w, col_h)
            for i in range(self.n_columns)
        ]

    @property
    def typography(self) -> Typography:
        return Typography(font_size_pt=self.font_pt, line_height=LINE_HEIGHT)

    @property
    def content_width(self) -> float:
        return self.columns[0].width - 2 * BLOCK_PAD

    def area(self) -> float:
        """Occupied content area: header plus all placed blocks."""
        blocks = sum(self.columns[0].width * h for _, _, _, h in self.assignment)
        return self.header.width * self.header.height + blocks


def block_height(layout: PosterLayout, section_idx: int, font_pt: float, scales: list[float]) -> float:
    """Section bar + summary text + scaled images + padding."""
    section = layout.sections[section_idx]
    content_w = layout.content_width
    bar_h = (font_pt + BAR_FONT_DELTA) * 4 / 3 * 1.5
    typo = Typography(font_size_pt=font_pt, line_height=LINE_HEIGHT)
    h = bar_h + BLOCK_PAD + text_height(section.summary, content_w, typo)
    for i, slot in enumerate(layout.images):
        if slot.section != section_idx:
            continue
        w, nat_h = slot.natural
        img_w = scales[i] * content_w
        h += IMAGE_GAP + img_w * nat_h / w
    return h + BLOCK_PAD


def try_place(
    layout: PosterLayout, font_pt: float, scales: list[float]
) -> tuple[list[tuple[int, int, float, float]] | None, float]:
    """Sequential column fill; returns (assignment, overflow px beyond capacity)."""
    assignment: list[tuple[int, int, float, float]] = []
    col = 0
    y = layout.columns[0].y
    overflow = 0.0
    for idx in range(len(layout.sections)):
        h = block_height(layout, idx, font_pt, scales)
        bottom = layout.columns[col].y + layout.columns[col].height
        if y + h > bottom and y > layout.columns[col].y:
            col += 1
            if col >= layout.n_columns:
                overflow += h - max(0.0, bottom - y)
                col = layout.n_columns - 1
                for rest in range(idx + 1, len(layout.sections)):
                    overflow += block_height(layout, rest, font_pt, scales)
                return None, overflow
            y = layout.columns[col].y
            bottom = layout.columns[col].y + layout.columns[col].height
        if y + h > bottom:
            overflow = (y + h) - bottom
            for rest in range(idx + 1, len(layout.sections)):
                overflow += block_height(layout, rest, font_pt, scales)
            return None, overflow
        assignment.append((idx, col, y, h))
        y += h + SECTION_GAP
    return assignment, 0.0


def feasible(layout: PosterLayout, font_pt: float | None = None, scales: list[float] | None = None) -> bool:
    assignment, _ = try_place(
        layout,
        layout.font_pt if font_pt is None else font_pt,
        [s.scale for s in layout.images] if scales is None else scales,
    )
    return assignment is not None


def reflow(layout: PosterLayout) -> None:
    assignment, overflow = try_place(layout, layout.font_pt, [s.scale for s in layout.images])
    if assignment is None:
        raise InfeasibleAtMinimum(overflow)
    layout.assignment = assignment


# --- outline generation -------------------------------------------------------

def representative_visuals(dag: ScholarDag, node_name: str) -> list[VisualNode]:
    """The 1-2 highest-resolution visuals aligned with the node."""
    aligned = dag.visuals_for(node_name)
    ranked = sorted(
        enumerate(aligned),
        key=lambda pair: (-(pair[1].resolution[0] * pair[1].resolution[1]), pair[0]),
    )
    return [v for _, v in ranked[:2]]


def gen_poster_outline(
    dag: ScholarDag, node_name: str, gw: Gateway | None, cfg: RunConfig
) -> PosterSection:
    """One summarized HTML section block per node, structure-validated."""
    node = dag.text_nodes[node_name]
    chosen = representative_visuals(dag, node_name)
    srcs = [v.path for v in chosen]

    if gw is None:
        summary = _fallback_summary(node.content)
        block = instantiate_section_block(node.name, summary, [(v.path, v.caption) for v in chosen])
        return PosterSection(node.name, summary, [v.name for v in chosen], block)

    def validator(value: object) -> list[str]:
        block = str(value)
        violations = []
        if len(SECTION_RE.findall(block)) != 1:
            violations.append('output must contain exactly one <section class="section"> block')
        if len(BODY_RE.findall(block)) != 1:
            violations.append('output must contain exactly one <div class="section-body">')
        bars = BAR_RE.findall(block)
        if len(bars) != 1:
            violations.append('output must contain exactly one <div class="section-bar">')
        elif node.name not in bars[0]:
            violations.append(f"the section-bar must contain the section name {node.name!r}")
        n_imgs = len(IMG_SECTION_RE.findall(block))
        if n_imgs != len(srcs):
            violations.append(
                f"expected {len(srcs)} img-section div(s), found {n_imgs}"
            )
        found_srcs = IMG_SRC_RE.findall(block)
        for src in srcs:
            if src not in found_srcs:
                violations.append(f"missing img tag with src=\"{src}\"")
        paragraphs = PARA_RE.findall(block)
        if not paragraphs:
            violations.append("the section-body must contain the summary in a <p> tag")
        else:
            summary = " ".join(paragraphs[0].split())
            words = len(summary.split())
            if words > MAX_SUMMARY_WORDS:
                violations.append(f"summary has {words} words; maximum is {MAX_SUMMARY_WORDS}")
            n_sentences = sentence_count(summary)
            if not 2 <= n_sentences <= 5:
                violations.append(f"summary must be 2-5 sentences, found {n_sentences}")
        if "<ul" in block or "<li" in block:
            violations.append("no bullet lists allowed in the summary")
        return violations

    user = (
        "SECTION_JSON:\n"
        + json.dumps({"name": node.name, "content": node.content}, ensure_ascii=False)
        + f"\n\nHAS_VISUAL: {'true' if srcs else 'false'}"
    )
    if srcs:
        user += "\nIMAGE_SRC: " + " ".join(srcs)
        user += "\nALT_TEXT: " + " | ".join(v.caption for v in chosen)
    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.POSTER_OUTLINE,
        user_parts=[TextPart(user)],
        stage_tag="poster_outline",
        temperature=cfg.temperature("poster_outline"),
    )
    block = str(gw.complete_validated(request, validator, extractor=lambda t: t.strip()))
    summary = " ".join(PARA_RE.findall(block)[0].split())
    return PosterSection(node.name, summary, [v.name for v in chosen], block)


def _fallback_summary(content: str) -> str:
    words = content.split()
    summary = " ".join(words[:MAX_SUMMARY_WORDS])
    if sentence_count(summary) < 2:
        summary = summary.rstrip(".") + ". Further details appear in the full text."
    return summary


def instantiate_section_block(title: str, summary: str, images: list[tuple[str, str]]) -> str:
    imgs = "".join(
        '\n    <div class="img-section">\n'
        f'      <img src="{html_lib.escape(src, quote=True)}" alt="{html_lib.escape(alt, quote=True)}" class="figure" />\n'
        "    </div>"
        for src, alt in images
    )
    return (
        '<section class="section">\n'
        f'  <div class="section-bar" contenteditable="true">{html_lib.escape(title)}</div>\n'
        '  <div class="section-body" contenteditable="true">\n'
        f"    <p>{html_lib.escape(summary)}</p>{imgs}\n"
        "  </div>\n"
        "</section>"
    )


# --- placement and optimization -------------------------------------------------

def place_initial(
    sections: list[PosterSection],
    visuals: dict[str, VisualNode],
    cfg: RunConfig,
    header_title: str = "",
    header_authors: str = "",
) -> PosterLayout:
    """Sequential reading-order placement at minimum font and image sizes."""
    if not sections:
        raise ValueError("cannot place an empty poster")
    f_min, _ = cfg.poster_font_range
    images: list[ImageSlot] = []
    for idx, section in enumerate(sections):
        for name in section.images:
            vis = visuals[name]
            images.append(
                ImageSlot(
                    section=idx,
                    name=name,
                    src=vis.path,
                    natural=vis.resolution,
                    scale=cfg.poster_s_min,
                )
            )
    layout = PosterLayout(
        canvas=cfg.poster_canvas,
        n_columns=cfg.poster_columns,
        sections=sections,
        images=images,
        font_pt=f_min,
        font_range=cfg.poster_font_range,
        s_min=cfg.poster_s_min,
        header_title=header_title,
        header_authors=header_authors,
    )
    reflow(layout)
    return layout


def font_grid(f_min: float, f_max: float, step: float = 0.5) -> list[float]:
    sizes = []
    n = 0
    while True:
        f = round(f_min + n * step, 4)
        if f > f_max + 1e-9:
            break
        sizes.append(f)
        n += 1
    return sizes


def optimize_fonts(layout: PosterLayout) -> Typography:
    """Largest overflow-free font on the quantized grid, by binary search.

    Image scales stay at their current (minimum) values; the overflow
    predicate is monotone in font size, which the search both exploits and
    effectively asserts (an infeasible lower bound fails loudly).
    """
    f_min, f_max = layout.font_range
    grid = font_grid(f_min, f_max)
    if not feasible(layout, font_pt=grid[0]):
        _, overflow = try_place(layout, grid[0], [s.scale for s in layout.images])
        raise InfeasibleAtMinimum(overflow)
    lo, hi = 0, len(grid) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(layout, font_pt=grid[mid]):
            lo = mid
        else:
            hi = mid - 1
    layout.font_pt = grid[lo]
    reflow(layout)
    return layout.typography


def expand_images(
    layout: PosterLayout, step: float = SCALE_STEP, trace: list | None = None
) -> PosterLayout:
    """Greedy image growth under fixed fonts.

    Repeatedly grow the image whose one-step increase yields the largest
    coverage gain while the re-flowed layout stays overflow-free; ties
    break by document order. Coverage gain per step is proportional to an
    image's natural fit area, so candidates rank by that, largest first.
    ``trace``, when given, collects the scale vector after every applied
    step for external feasibility auditing.
    """
    if not layout.images:
        reflow(layout)
        return layout
    content_w = layout.content_width

    def fit_area(slot: ImageSlot) -> float:
        w, h = slot.natural
        return content_w * content_w * h / w

    while True:
        candidates = []
        scales = [s.scale for s in layout.images]
        for i, slot in enumerate(layout.images):
            next_scale = round(slot.scale + step, 4)
            if next_scale > 1.0 + 1e-9:
                continue
            trial = list(scales)
            trial[i] = next_scale
            if feasible(layout, scales=trial):
                candidates.append(i)
        if not candidates:
            break
        best = max(candidates, key=lambda i: (fit_area(layout.images[i]), -i))
        layout.images[best].scale = round(layout.images[best].scale + step, 4)
        if trace is not None:
            trace.append([s.scale for s in layout.images])
    reflow(layout)
    return layout


def visual_coverage(layout: PosterLayout) -> float:
    content_w = layout.content_width
    canvas_area = layout.canvas[0] * layout.canvas[1]
    total = 0.0
    for slot in layout.images:
        w, h = slot.natural
        img_w = slot.scale * content_w
        total += img_w * (img_w * h / w)
    return total / canvas_area


def score(layout: PosterLayout, lam: float) -> float:
    """Readability + lambda * VisualCoverage, both normalized to [0, 1].

    Reported for run summaries and regression tracking; the optimizer is
    the decoupled two-phase procedure, not this scalarization.
    """
    f_min, f_max = layout.font_range
    readability = (layout.font_pt - f_min) / (f_max - f_min) if f_max > f_min else 1.0
    return readability + lam * visual_coverage(layout)


# --- export ---------------------------------------------------------------------

_POSTER_CSS = """\
html, body { margin: 0; padding: 0; }
.poster { position: relative; background: #fbfbf8; font-family: Helvetica, Arial, sans-serif; }
.poster-header { position: absolute; background: #16325c; color: #ffffff; border-radius: 10px;
                 display: flex; flex-direction: column; justify-content: center;
                 align-items: center; text-align: center; box-sizing: border-box; }
.poster-header .title { font-weight: bold; }
.section-block { position: absolute; box-sizing: border-box; }
.section { background: #ffffff; border: 1px solid #d5d9e0; border-radius: 8px;
           height: 100%; box-sizing: border-box; overflow: hidden; }
.section-bar { background: #16325c; color: #ffffff; font-weight: bold;
               padding: 6px 14px; box-sizing: border-box; }
.section-body { padding: PADpx; box-sizing: border-box; }
.section-body p { margin: 0 0 10px 0; }
.img-section { text-align: center; margin-top: IMGGAPpx; }
""".replace("PAD", str(BLOCK_PAD)).replace("IMGGAP", str(IMAGE_GAP))


def _inject_image_widths(block: str, widths: dict[str, float]) -> str:
    def repl(match: re.Match) -> str:
        src = match.group(1)
        if src in widths:
            return match.group(0) + f' style="width:{widths[src]:.0f}px"'
        return match.group(0)

    return re.sub(r"<img\s+[^>]*src=\"([^\"]+)\"", repl, block)


def render_poster_html(layout: PosterLayout) -> str:
    width, height = layout.canvas
    font_px = layout.font_pt * 4 / 3
    bar_pt = layout.font_pt + BAR_FONT_DELTA
    head = layout.header
    title_pt = bar_pt * 2
    parts = [
        "<!DOCTYPE html>",
        "<html>",
        "<head>",
        '<meta charset="utf-8">',
        "<style>",
        _POSTER_CSS
        + f".section-body {{ font-size: {layout.font_pt:g}pt; line-height: {LINE_HEIGHT}; }}\n"
        + f".section-bar {{ font-size: {bar_pt:g}pt; }}\n",
        "</style>",
        "</head>",
        "<body>",
        f'<div class="poster" style="width:{width}px;height:{height}px;">',
        f'<div class="poster-header" style="left:{head.x:.0f}px;top:{head.y:.0f}px;'
        f'width:{head.width:.0f}px;height:{head.height:.0f}px;">',
        f'<div class="title" style="font-size:{title_pt:g}pt;">{html_lib.escape(layout.header_title)}</div>',
        f'<div class="authors" style="font-size:{bar_pt:g}pt;">{html_lib.escape(layout.header_authors)}</div>',
        "</div>",
    ]
    content_w = layout.content_width
    for section_idx, col, y, h in layout.assignment:
        box = layout.columns[col]
        widths = {
            slot.src: slot.scale * content_w
            for slot in layout.images
            if slot.section == section_idx
        }
        block = _inject_image_widths(layout.sections[section_idx].html_block, widths)
        parts.append(
            f'<div class="section-block" data-section-index="{section_idx}" '
            f'data-x="{box.x:.0f}" data-y="{y:.0f}" data-width="{box.width:.0f}" data-height="{h:.0f}" '
            f'style="left:{box.x:.0f}px;top:{y:.0f}px;width:{box.width:.0f}px;height:{h:.0f}px;">'
        )
        parts.append(block)
        parts.append("</div>")
    parts.extend(["</div>", "</body>", "</html>", ""])
    return "\n".join(parts)


def export_poster(layout: PosterLayout, out_dir: str | Path, lam: float) -> tuple[Path, Path]:
    """Write the self-contained poster.html plus poster.json geometry record."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    html_path = out / "poster.html"
    html_path.write_text(render_poster_html(layout), encoding="utf-8")
    doc = {
        "canvas": {"width": layout.canvas[0], "height": layout.canvas[1]},
        "columns": [
            {"x": round(b.x, 2), "y": round(b.y, 2), "width": round(b.width, 2), "height": round(b.height, 2)}
            for b in layout.columns
        ],
        "font_size_pt": layout.font_pt,
        "line_height": LINE_HEIGHT,
        "scales": [
            {"section": s.section, "name": s.name, "scale": s.scale} for s in layout.images
        ],
        "assignment": [
            {
                "section": layout.sections[idx].title,
                "section_index": idx,
                "column": col,
                "x": round(layout.columns[col].x, 0),
                "y": round(y, 0),
                "height": round(h, 0),
            }
            for idx, col, y, h in layout.assignment
        ],
        "lambda": lam,
        "score": round(score(layout, lam), 4),
    }
    json_path = out / "poster.json"
    json_path.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return html_path, json_path


# --- pipeline entry ---------------------------------------------------------------

def build_poster(
    dag: ScholarDag, gw: Gateway | None, cfg: RunConfig, warnings: list[str] | None = None
) -> PosterLayout:
    root = dag.text_nodes[dag.root]
    selected = bfs_select(dag, TraversalBudget(cfg.poster_k))
    sections = [gen_poster_outline(dag, name, gw, cfg) for name in selected]
    authors = root.content.split(" | ")[0] if root.content else ""
    layout = place_initial(
        sections, dag.visual_nodes, cfg, header_title=root.name, header_authors=authors
    )
    optimize_fonts(layout)
    expand_images(layout)
    if warnings is not None and not layout.images:
        warnings.append("poster has no images; coverage term is zero")
    return layout
