"""Deterministic text metrics, the overflow predicate, and the renderer shim.

The character-grid model below (average glyph width = alpha * font size,
1pt = 4/3 px) stands in for browser layout while optimizing: it is fast,
platform-independent, and monotone in font size, which is exactly what the
poster font search needs. The external renderer is used only to produce
slide screenshots for the visual audit loop.
"""

from __future__ import annotations

import math
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path

from .errors import BoxTooNarrow, DimensionMismatch, RendererFailed, RendererMissing

PT_TO_PX = 4.0 / 3.0


@dataclass(frozen=True)
class Typography:
    font_size_pt: float
    line_height: float = 1.2
    glyph_width_ratio: float = 0.5

    def __post_init__(self) -> None:
        if self.font_size_pt <= 0:
            raise ValueError("font size must be positive")
        if self.line_height < 1.0:
            raise ValueError("line height must be >= 1.0")
        if not 0 < self.glyph_width_ratio < 1:
            raise ValueError("glyph width ratio must be in (0, 1)")

    @property
    def font_size_px(self) -> float:
        return self.font_size_pt * PT_TO_PX


@dataclass(frozen=True)
class Box:
    x: float
    y: float
    width: float
    height: float

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"box must have positive size, got {self.width}x{self.height}")


def text_height(text: str, width_px: float, typo: Typography) -> float:
    """Estimated pixel height of ``text`` wrapped into ``width_px``.

    Length is counted on whitespace-collapsed text; a non-empty text takes
    at least one line. Monotone non-decreasing in text length and font
    size, non-increasing in width.
    """
    collapsed = " ".join(text.split())
    if not collapsed:
        return 0.0
    glyph_w = typo.glyph_width_ratio * typo.font_size_px
    chars_per_line = math.floor(width_px / glyph_w)
    if chars_per_line < 1:
        raise BoxTooNarrow(
            f"width {width_px:.0f}px cannot hold one {typo.font_size_pt}pt glyph"
        )
    lines = max(1, math.ceil(len(collapsed) / chars_per_line))
    return lines * typo.font_size_px * typo.line_height


def overflows(block_texts: list[str], block_boxes: list[Box], typo: Typography) -> bool:
    """True iff any block's text exceeds its box height.

    Monotone in font size for fixed content: once a size overflows, every
    larger size does too.
    """
    if len(block_texts) != len(block_boxes):
        raise ValueError("block_texts and block_boxes must have the same length")
    for text, box in zip(block_texts, block_boxes):
        if text_height(text, box.width, typo) > box.height:
            return True
    return False


def render_html(html: str, width_px: int, height_px: int, renderer_cmd: str) -> bytes:
    """Render HTML to a PNG of exactly the requested size via an external tool.

    ``renderer_cmd`` is a command template with ``{input}``, ``{output}``,
    ``{width}``, ``{height}`` placeholders, e.g. a headless-browser
    screenshot invocation.
    """
    if not renderer_cmd:
        raise RendererMissing(
            "no renderer configured; set renderer_cmd (e.g. a headless-browser "
            "screenshot command with {input}/{output}/{width}/{height} placeholders)"
        )
    with tempfile.TemporaryDirectory(prefix="paperx-render-") as tmp:
        in_path = Path(tmp) / "slide.html"
        out_path = Path(tmp) / "slide.png"
        in_path.write_text(html, encoding="utf-8")
        cmd = [
            arg.format(input=str(in_path), output=str(out_path), width=width_px, height=height_px)
            for arg in shlex.split(renderer_cmd)
        ]
        try:
            proc = subprocess.run(cmd, capture_output=True, text=True, timeout=120)
        except FileNotFoundError:
            raise RendererMissing(f"renderer executable not found: {cmd[0]}") from None
        if proc.returncode != 0:
            raise RendererFailed(f"renderer exited with {proc.returncode}", proc.stderr)
        if not out_path.exists():
            raise RendererFailed("renderer produced no output file", proc.stderr)
        data = out_path.read_bytes()

    from PIL import Image
    import io

    with Image.open(io.BytesIO(data)) as img:
        if img.size != (width_px, height_px):
            raise DimensionMismatch(
                f"renderer produced {img.size[0]}x{img.size[1]}, "
                f"expected {width_px}x{height_px}"
            )
    return data
