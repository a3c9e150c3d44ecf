"""A deterministic scripted chat model for offline tests and fixtures.

Dispatches on the request's system prompt and answers each pipeline stage
with a mechanically computed, schema-correct response. Recording a run
against this transport produces a replayable transcript.
"""

from __future__ import annotations

import json
import re

from paperx import prompts
from paperx.gateway import ChatRequest, ChatResponse
from paperx.paper2dag import REMOVAL_HEADING_RE, heading_split, single_line
from paperx.poster import instantiate_section_block, sentence_count
from paperx.ppt import bulletize, classify_template

SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")


def sentences_of(text: str) -> list[str]:
    return [s.strip() for s in SENTENCE_RE.split(text) if s.strip()]


def take_words(sents: list[str], target: int, min_sentences: int = 1) -> str:
    taken: list[str] = []
    count = 0
    for s in sents:
        if taken and count + len(s.split()) > target:
            break
        taken.append(s)
        count += len(s.split())
        if count >= target and len(taken) >= min_sentences:
            break
    return " ".join(taken)


class ScriptedTransport:
    """Callable transport: ChatRequest -> deterministic ChatResponse."""

    def __init__(self) -> None:
        self.calls = 0

    def __call__(self, request: ChatRequest) -> ChatResponse:
        self.calls += 1
        user = request.user_text()
        handlers = {
            prompts.CLEAN: self.clean,
            prompts.SECTION_SPLIT: self.split,
            prompts.INITIALIZE_DAG: self.init_dag,
            prompts.SECTION_DAG_GENERATION: self.decompose,
            prompts.VISUAL_DAG: self.visual_dag,
            prompts.GENERATE_COMPLETE_OUTLINE: self.slide_outline,
            prompts.ARRANGE_TEMPLATE: self.arrange_template,
            prompts.COMMENTER: self.commenter,
            prompts.REVISER: self.reviser,
            prompts.POSTER_OUTLINE: self.poster_outline,
            prompts.GENERATE_PR: self.generate_pr,
            prompts.ADD_TITLE_AND_HASHTAG: self.title_tags,
            prompts.PR_REFINEMENT: self.pr_refine,
        }
        handler = handlers.get(request.system)
        if handler is None:
            raise AssertionError(f"scripted model has no handler for stage {request.stage_tag}")
        text = handler(user)
        return ChatResponse(
            text=text, input_tokens=len(user) // 4, output_tokens=len(text) // 4
        )

    # -- dag construction stages ------------------------------------------

    def clean(self, markdown: str) -> str:
        out: list[str] = []
        skip_level: int | None = None
        for line in markdown.splitlines():
            stripped = line.strip()
            heading = re.match(r"^(#{1,6})\s", stripped)
            if heading:
                level = len(heading.group(1))
                if skip_level is not None and level <= skip_level:
                    skip_level = None
                if REMOVAL_HEADING_RE.match(stripped):
                    skip_level = level
                    continue
            if skip_level is None:
                out.append(line)
        return "\n".join(out)

    def split(self, cleaned: str) -> str:
        chunks = [body for _, body in heading_split(cleaned).sections]
        return "\n===SPLIT===\n".join(chunks)

    def init_dag(self, markdown: str) -> str:
        lines = [l.strip() for l in markdown.splitlines() if l.strip()]
        title = lines[0].lstrip("#").strip() if lines else ""
        authors = lines[1] if len(lines) > 1 else ""
        root = {"name": title, "content": authors, "edge": [], "level": 0, "visual_node": []}
        return json.dumps({"nodes": [root]}, ensure_ascii=False)

    def decompose(self, user: str) -> str:
        name_part, _, content = user.partition("\n\nFull Markdown Content:\n")
        name = name_part[len("Section Name: "):].strip()
        content = single_line(content)
        nodes: list[dict] = []
        used: set[str] = set()

        def child_name(text: str) -> str:
            base = " ".join(text.split()[:5]).rstrip(".,;:")
            candidate = base
            n = 2
            while candidate in used:
                candidate = f"{base} ({n})"
                n += 1
            used.add(candidate)
            return candidate

        def emit(node_name: str, node_content: str, level: int) -> dict:
            node = {
                "name": node_name,
                "content": node_content,
                "edge": [],
                "level": level,
                "visual_node": [],
            }
            nodes.append(node)
            sents = sentences_of(node_content)
            if level < 4 and len(sents) >= 4:
                n_children = 3 if len(sents) >= 6 else 2
                size = len(sents) // n_children
                bounds = [0] + [size * i for i in range(1, n_children)] + [len(sents)]
                for start, end in zip(bounds, bounds[1:]):
                    chunk = " ".join(sents[start:end])
                    child = emit(child_name(chunk), chunk, level + 1)
                    node["edge"].append(child["name"])
            return node

        used.add(name)
        emit(name, content, 1)
        return json.dumps({"nodes": nodes}, ensure_ascii=False)

    def visual_dag(self, user: str) -> str:
        refs_part, _, markdown = user.partition("\n\nFull Markdown text:\n")
        refs = [l.strip() for l in refs_part.splitlines()[1:] if l.strip()]
        lines = markdown.splitlines()
        caption_re = re.compile(
            r"^(?:\*\*)?(figure|fig\.?|table|tab\.?|equation|eq\.?)\s*\(?\d*", re.IGNORECASE
        )
        entries = []
        for ref in refs:
            rel = ref[4:-1]
            caption = ""
            for i, line in enumerate(lines):
                if rel in line:
                    following = [l.strip() for l in lines[i + 1 : i + 4] if l.strip()]
                    preceding = [l.strip() for l in lines[max(0, i - 3) : i] if l.strip()]
                    for cand in following + list(reversed(preceding)):
                        if caption_re.match(cand):
                            caption = cand
                            break
                    break
            if not caption:
                stem = rel.rsplit("/", 1)[-1].rsplit(".", 1)[0]
                caption = f"Illustration of {stem} from the paper."
            formula = 1 if re.search(r"\b(equation|eq)\b", caption, re.IGNORECASE) else 0
            entries.append(
                {"name": ref, "caption": caption, "visual_node": 1, "formula": formula}
            )
        return json.dumps({"nodes": entries}, ensure_ascii=False)

    # -- slide stages ------------------------------------------------------

    def slide_outline(self, user: str) -> str:
        node = json.loads(user.partition("selected_node:\n")[2])
        summary = take_words(sentences_of(node["content"]), 45)
        figures, formulas = [], []
        for item in node.get("visual_node", []):
            entry = {
                "name": item["name"],
                "caption": item.get("caption", ""),
                "resolution": item.get("resolution", ""),
            }
            (formulas if item.get("formula") else figures).append(entry)
        return json.dumps(
            {"text": summary, "figure": figures, "formula": formulas, "template": None},
            ensure_ascii=False,
        )

    def arrange_template(self, user: str) -> str:
        outline = json.loads(user)[0]
        first = (outline["figure"] or outline["formula"] or [None])[0]
        orientation = "square"
        if first and "x" in first.get("resolution", ""):
            w, h = (int(v) for v in first["resolution"].split("x"))
            orientation = "wide" if w > 1.2 * h else ("tall" if h > 1.2 * w else "square")
        template = classify_template(
            len(outline["figure"]),
            len(outline["formula"]),
            orientation,
            bool(outline["text"].strip()),
        )
        return json.dumps({"template": template})

    def commenter(self, user: str) -> str:
        return (
            "## Part 1: Audit Conclusion\n"
            "Status: PASS\n"
            "Reason: The slide is legible, balanced, and free of overflow.\n"
            "## Part 2: Engineer-Oriented Instructions\n"
            "None\n"
        )

    def reviser(self, user: str) -> str:
        instr_part, _, rest = user.partition("\n\nOriginal Layout Tree (JSON):\n")
        tree_json, _, outline_json = rest.partition("\n\nPPT Outline:\n")
        tree = json.loads(tree_json)
        outline = json.loads(outline_json)
        instructions = re.findall(
            r"-\s*\[TARGET:\s*(.*?)\]\s*->\s*\[ACTION:\s*([A-Z_]+)\]\s*->\s*\[DETAIL:\s*(.*?)\]\s*$",
            instr_part,
            re.MULTILINE,
        )

        def text_nodes(node, acc):
            if node.get("kind") == "text":
                acc.append(node)
            for child in node.get("children", []):
                text_nodes(child, acc)
            return acc

        all_texts = text_nodes(tree, [])
        for target, action, detail in instructions:
            nodes = [n for n in all_texts if n.get("slot") == target] or [
                n for n in all_texts if n.get("role", "body") == "body"
            ]
            if action == "TYPOGRAPHY":
                size_m = re.search(r"(\d+(?:\.\d+)?)\s*pt", detail)
                lh_m = re.search(r"line-height[^\d]*(\d+(?:\.\d+)?)", detail, re.IGNORECASE)
                for n in nodes:
                    typo = n.setdefault("typography", {})
                    if size_m:
                        typo["font-size"] = min(max(float(size_m.group(1)), 16.0), 24.0)
                    if lh_m:
                        typo["line-height"] = min(float(lh_m.group(1)), 1.5)
            elif action in ("REWRITE", "ADD_CONTENT"):
                text = take_words(sentences_of(outline.get("text", "")), 50)
                for n in nodes[:1]:
                    n["content"] = bulletize(text)
            elif action == "REWRITE_SHORTEN":
                text = take_words(sentences_of(outline.get("text", "")), 18)
                for n in nodes[:1]:
                    n["content"] = bulletize(text)
            elif action == "RESIZE":
                for n in nodes[:1]:
                    n["flex"] = round(float(n.get("flex", 1.0)) * 1.25, 3)
            elif action == "MODIFY_TITLE":
                tree["heading"] = detail.strip()
        return json.dumps(tree, ensure_ascii=False)

    # -- poster / pr stages --------------------------------------------------

    def poster_outline(self, user: str) -> str:
        section_json, _, rest = user.partition("\n\nHAS_VISUAL:")
        section = json.loads(section_json.partition("SECTION_JSON:\n")[2])
        srcs: list[str] = []
        alts: list[str] = []
        src_m = re.search(r"IMAGE_SRC:\s*(.+)", rest)
        if src_m:
            srcs = src_m.group(1).split()
        alt_m = re.search(r"ALT_TEXT:\s*(.+)", rest)
        if alt_m:
            alts = [a.strip() for a in alt_m.group(1).split(" | ")]
        summary = take_words(sentences_of(section["content"]), 38, min_sentences=2)
        while len(summary.split()) > 38:
            summary = " ".join(summary.split()[:38]).rstrip(".,;") + "."
        if sentence_count(summary) < 2:
            summary = summary.rstrip(".") + ". See the full text for details."
        images = [(src, alts[i] if i < len(alts) else "figure") for i, src in enumerate(srcs)]
        return instantiate_section_block(section["name"], summary, images)

    def generate_pr(self, user: str) -> str:
        node = json.loads(user)
        name = node["name"].lower()
        sents = sentences_of(node["content"])
        image_line = ""
        visuals = node.get("visual_node", [])
        if visuals:
            image_line = "\n" + visuals[0]["name"]
        if any(k in name for k in ("intro", "motivation", "problem")):
            half = max(1, len(sents) // 2)
            key_q = take_words(sents[:half], 30)
            idea = take_words(sents[half:], 30) or key_q
            return f"Key Question: {key_q}\nBrilliant Idea: {idea}{image_line}"
        if any(k in name for k in ("conclusion", "discussion", "future")):
            return f"Significance/Impact: {take_words(sents, 40)}"
        if any(k in name for k in ("experiment", "result", "evaluation", "analysis")):
            return f"Core Results: {take_words(sents, 40)}{image_line}"
        return f"Core Methods: {take_words(sents, 45)}{image_line}"

    def title_tags(self, draft: str) -> str:
        bold = re.search(r"\*\*(.+?)\*\*", draft)
        title = bold.group(1) if bold else "A New Research Result"
        words = [re.sub(r"[^A-Za-z0-9]", "", w) for w in title.split()]
        words = [w for w in words if len(w) > 3]
        tags = ["#" + w.capitalize() for w in words[:3]]
        while len(tags) < 3:
            tags.append(["#Research", "#Science", "#Paper"][len(tags) % 3])
        seen: list[str] = []
        for t in tags:
            base = t
            n = 2
            while t in seen:
                t = f"{base}{n}"
                n += 1
            seen.append(t)
        return (
            f"Title: What {title} changes and why it matters\n"
            f"Specific Tag: {' '.join(seen[:3])}\n"
            "Community Tag: #AcademicResearch\n"
        )

    def pr_refine(self, body: str) -> str:
        refined = body
        for label, emoji in (
            ("Key Question:", "🔍"),
            ("Brilliant Idea:", "💡"),
            ("Core Methods:", "🛠️"),
            ("Core Results:", "📊"),
            ("Significance/Impact:", "🚀"),
        ):
            refined = refined.replace(label, f"{label} {emoji}", 1)
        return refined
