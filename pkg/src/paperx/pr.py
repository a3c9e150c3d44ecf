"""Promotion-post backend: classify sections, headline/hashtags, styling.

Each selected node becomes a labeled block (Key Question / Core Methods /
Core Results / Significance), the assembled draft gets a headline plus
exactly four hashtags, and every block is tone-refined under mechanical
guards: the word count stays near the original and image references
survive byte-exactly.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import RunConfig
from .dag import ScholarDag, TraversalBudget, bfs_select
from .errors import ValidationExhausted
from .gateway import ChatRequest, Gateway, TextPart
from .paper2dag import selected_payload
from . import prompts

log = logging.getLogger(__name__)

KINDS = ("IntroductionLike", "MethodsLike", "ResultsLike", "ConclusionLike")

KIND_LABELS: dict[str, tuple[str, ...]] = {
    "IntroductionLike": ("Key Question:", "Brilliant Idea:"),
    "MethodsLike": ("Core Methods:",),
    "ResultsLike": ("Core Results:",),
    "ConclusionLike": ("Significance/Impact:",),
}

HASHTAG_RE = re.compile(r"^#[^\s#]+$")
IMAGE_LINE_RE = re.compile(r"!\[[^\]]*\]\([^)]+\)")
WORD_BAND = 0.30  # refinement may move the word count by at most +/-30%


@dataclass
class PrSection:
    kind: str
    body: str
    image: str | None = None  # visual markdown reference

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown PR section kind '{self.kind}'")
        if self.kind == "ConclusionLike" and self.image:
            raise ValueError("conclusion sections carry no image")


@dataclass
class PrDocument:
    headline: str
    specific_tags: list[str]
    community_tag: str
    header: dict[str, str]  # title / authors / affiliations / repo_url
    sections: list[PrSection] = field(default_factory=list)
    refined: bool = False

    def __post_init__(self) -> None:
        if len(self.specific_tags) != 3:
            raise ValueError("a PR document carries exactly 3 specific tags")
        for tag in [*self.specific_tags, self.community_tag]:
            if not HASHTAG_RE.match(tag):
                raise ValueError(f"malformed hashtag {tag!r}")


def detect_kind(body: str) -> str | None:
    for kind, labels in KIND_LABELS.items():
        if all(label in body for label in labels):
            return kind
    return None


def classify_and_summarize(
    dag: ScholarDag, node_name: str, gw: Gateway, cfg: RunConfig
) -> PrSection:
    """Model-side classification into one of the four labeled formats."""
    aligned = {v.name for v in dag.visuals_for(node_name)}
    aligned_paths = {v.path: v.name for v in dag.visuals_for(node_name)}

    def validator(value: object) -> list[str]:
        body = str(value).strip()
        violations = []
        kind = detect_kind(body)
        if kind is None:
            violations.append(
                "output must start with exactly one of the label formats: "
                + "; ".join(" + ".join(labels) for labels in KIND_LABELS.values())
            )
            return violations
        matched = sum(1 for labels in KIND_LABELS.values() if labels[0] in body)
        if matched > 1:
            violations.append("output mixes labels from more than one format")
        images = IMAGE_LINE_RE.findall(body)
        if len(images) > 1:
            violations.append("choose at most ONE image")
        if images:
            if kind == "ConclusionLike":
                violations.append("the conclusion format has no image line")
            ref = images[0]
            path = ref[ref.index("(") + 1 : -1]
            if ref not in aligned and path not in aligned_paths:
                violations.append(
                    f"image {ref} is not aligned with this node; omit the image line"
                )
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.GENERATE_PR,
        user_parts=[TextPart(selected_payload(dag, node_name))],
        stage_tag="pr_outline",
        temperature=cfg.temperature("pr_outline"),
    )
    body = str(gw.complete_validated(request, validator, extractor=lambda t: t.strip()))
    kind = detect_kind(body)
    assert kind is not None
    images = IMAGE_LINE_RE.findall(body)
    image = None
    if images:
        ref = images[0]
        path = ref[ref.index("(") + 1 : -1]
        image = ref if ref in aligned else aligned_paths.get(path)
    return PrSection(kind=kind, body=body, image=image)


def gen_title_tags(draft: str, gw: Gateway, cfg: RunConfig) -> tuple[str, list[str], str]:
    """Headline plus exactly 3 specific tags and 1 community tag."""

    def parse(text: str) -> tuple[str, list[str], str] | None:
        title = specific = community = None
        for line in str(text).splitlines():
            line = line.strip()
            if line.lower().startswith("title:"):
                title = line[6:].strip()
            elif line.lower().startswith("specific tag:"):
                specific = line[len("specific tag:") :].split()
            elif line.lower().startswith("community tag:"):
                community = line[len("community tag:") :].strip()
        if title is None or specific is None or community is None:
            return None
        return title, specific, community

    def validator(value: object) -> list[str]:
        parsed = parse(str(value))
        if parsed is None:
            return [
                "output must be exactly three lines: 'Title: ...', "
                "'Specific Tag: #A #B #C', 'Community Tag: #D'"
            ]
        title, specific, community = parsed
        violations = []
        if not title:
            violations.append("the title must not be empty")
        if len(specific) != 3:
            violations.append(f"exactly 3 specific tags required, found {len(specific)}")
        for tag in specific + [community]:
            if not HASHTAG_RE.match(tag):
                violations.append(
                    f"tag {tag!r} must start with '#' and contain no whitespace"
                )
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=prompts.ADD_TITLE_AND_HASHTAG,
        user_parts=[TextPart(draft)],
        stage_tag="pr_final",
        temperature=cfg.temperature("pr_final"),
    )
    text = str(gw.complete_validated(request, validator, extractor=lambda t: t))
    parsed = parse(text)
    assert parsed is not None
    return parsed


def refine_style(
    section: PrSection, gw: Gateway, cfg: RunConfig, style_prompt: str | None = None
) -> str:
    """Tone-refined body. Word count, labels, and image refs are guarded."""
    if not section.body.strip():
        return section.body
    original_words = len(section.body.split())
    original_images = set(IMAGE_LINE_RE.findall(section.body))
    labels = KIND_LABELS[section.kind]

    def validator(value: object) -> list[str]:
        refined = str(value).strip()
        violations = []
        words = len(refined.split())
        low = int(original_words * (1 - WORD_BAND))
        high = max(int(original_words * (1 + WORD_BAND)) + 1, low + 1)
        if not low <= words <= high:
            violations.append(
                f"word count {words} is outside [{low}, {high}] "
                f"(keep approximately the original {original_words} words)"
            )
        if set(IMAGE_LINE_RE.findall(refined)) != original_images:
            violations.append(
                "every original image markdown reference must be preserved verbatim "
                "and none may be added"
            )
        for label in labels:
            if label not in refined:
                violations.append(f"the label {label!r} must be retained")
        return violations

    request = ChatRequest(
        model=cfg.llm_model,
        system=style_prompt or prompts.PR_REFINEMENT,
        user_parts=[TextPart(section.body)],
        stage_tag="pr_final",
        temperature=cfg.temperature("pr_final"),
    )
    return str(gw.complete_validated(request, validator, extractor=lambda t: t.strip()))


# --- assembly / export --------------------------------------------------------

def split_root_meta(root_content: str) -> dict[str, str]:
    """Recover authors / affiliations / repo from the root metadata line."""
    parts = [p.strip() for p in root_content.split(" | ") if p.strip()]
    header: dict[str, str] = {}
    for part in parts:
        if part.startswith(("http://", "https://")):
            header["repo_url"] = part
        elif "authors" not in header:
            header["authors"] = part
        else:
            header["affiliations"] = part
    return header


def assemble_draft(header: dict[str, str], sections: list[PrSection]) -> str:
    lines = [f"**{header.get('title', '')}**"]
    for key in ("authors", "affiliations", "repo_url"):
        if header.get(key):
            lines.append(header[key])
    blocks = "\n\n".join(s.body for s in sections)
    return "\n".join(lines) + "\n\n" + blocks


def build_pr(
    dag: ScholarDag, gw: Gateway, cfg: RunConfig, warnings: list[str] | None = None
) -> PrDocument:
    root = dag.text_nodes[dag.root]
    header = {"title": root.name, **split_root_meta(root.content)}
    selected = bfs_select(dag, TraversalBudget(cfg.pr_k))
    sections = [classify_and_summarize(dag, name, gw, cfg) for name in selected]

    draft = assemble_draft(header, sections)
    headline, specific, community = gen_title_tags(draft, gw, cfg)

    style_prompt = None
    if cfg.pr_style_prompt_file is not None:
        style_prompt = Path(cfg.pr_style_prompt_file).read_text(encoding="utf-8")
    for section in sections:
        section.body = refine_style(section, gw, cfg, style_prompt)

    return PrDocument(
        headline=headline,
        specific_tags=specific,
        community_tag=community,
        header=header,
        sections=sections,
        refined=True,
    )


def render_pr_markdown(doc: PrDocument) -> str:
    lines = [f"# {doc.headline}", " ".join(doc.specific_tags + [doc.community_tag]), ""]
    lines.append(f"**{doc.header.get('title', '')}**")
    for key in ("authors", "affiliations"):
        if doc.header.get(key):
            lines.append(doc.header[key])
    if doc.header.get("repo_url"):
        lines.append(f"Code: {doc.header['repo_url']}")
    lines.append("")
    for section in doc.sections:
        lines.append(section.body)
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def export_pr(doc: PrDocument, out_dir: str | Path) -> tuple[Path, Path]:
    """Write pr.md plus the structured pr.json companion."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    md_path = out / "pr.md"
    md_path.write_text(render_pr_markdown(doc), encoding="utf-8")
    payload = {
        "headline": doc.headline,
        "specific_tags": doc.specific_tags,
        "community_tag": doc.community_tag,
        "header": doc.header,
        "refined": doc.refined,
        "sections": [
            {"kind": s.kind, "body": s.body, "image": s.image} for s in doc.sections
        ],
    }
    json_path = out / "pr.json"
    json_path.write_text(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return md_path, json_path
