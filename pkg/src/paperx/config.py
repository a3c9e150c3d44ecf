"""Run configuration: defaults, config file, environment, CLI overrides.

Precedence (low to high): built-in defaults < config file < environment
variables < CLI flags. The config file is a flat ``key = value`` file with
dotted keys (paperx.toml style); values parse as numbers, booleans, or
strings.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError
from .gateway import DEFAULT_TEMPERATURES, ENV_BASE_URL, ENV_MODEL

DEFAULT_MODEL = "gpt-4o"


@dataclass
class RunConfig:
    input_dir: Path = Path(".")
    out_dir: Path | None = None  # defaults to <input_dir>/out
    llm_model: str = DEFAULT_MODEL
    vlm_model: str = ""  # empty -> use llm_model
    temperatures: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TEMPERATURES))
    ppt_k: int = 15
    poster_k: int = 5
    pr_k: int = 5
    max_depth: int = 4
    refine_iters: int = 3
    use_vlm_audit: bool = False
    llm_split: bool = True
    llm_template_select: bool = True
    poster_canvas: tuple[int, int] = (3456, 2304)
    poster_columns: int = 3
    poster_lambda: float = 0.5
    poster_font_range: tuple[float, float] = (18.0, 36.0)
    poster_s_min: float = 0.4
    transcript_mode: str = "live"
    transcript_path: Path | None = None
    renderer_cmd: str = ""
    prices: dict[str, tuple[float, float]] = field(default_factory=dict)
    pr_style_prompt_file: Path | None = None
    metadata_overrides: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("ppt_k", "poster_k", "pr_k"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 1 <= self.max_depth <= 4:
            raise ConfigError("max_depth must be within [1, 4]")
        if self.refine_iters < 1:
            raise ConfigError("refine_iters must be >= 1")

    @property
    def resolved_out_dir(self) -> Path:
        return self.out_dir if self.out_dir is not None else self.input_dir / "out"

    @property
    def vlm(self) -> str:
        return self.vlm_model or self.llm_model

    def temperature(self, stage: str) -> float:
        return self.temperatures.get(stage, 0.0)


def _coerce(raw: str):
    text = raw.strip().strip('"').strip("'")
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    return text


def read_config_file(path: Path) -> dict[str, object]:
    """Flat ``key = value`` parser for paperx.toml-style files."""
    values: dict[str, object] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#") or stripped.startswith("["):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        values[key.strip()] = _coerce(raw)
    return values


def parse_canvas(raw: str) -> tuple[int, int]:
    w_s, sep, h_s = raw.lower().partition("x")
    if not sep:
        raise ConfigError(f"canvas must be WxH, got '{raw}'")
    try:
        w, h = int(w_s), int(h_s)
    except ValueError:
        raise ConfigError(f"canvas must be WxH integers, got '{raw}'") from None
    if w <= 0 or h <= 0:
        raise ConfigError("canvas dimensions must be positive")
    return w, h


def load_prices(path: Path) -> dict[str, tuple[float, float]]:
    """Price table JSON: model -> {"input_per_1k": x, "output_per_1k": y}."""
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read price table {path}: {exc}") from exc
    prices: dict[str, tuple[float, float]] = {}
    for model, spec in doc.items():
        if isinstance(spec, dict):
            prices[model] = (float(spec["input_per_1k"]), float(spec["output_per_1k"]))
        else:
            p_in, p_out = spec
            prices[model] = (float(p_in), float(p_out))
    return prices


_FILE_KEYS = {
    "model": "llm_model",
    "vlm_model": "vlm_model",
    "ppt_k": "ppt_k",
    "poster_k": "poster_k",
    "pr_k": "pr_k",
    "max_depth": "max_depth",
    "refine_iters": "refine_iters",
    "renderer_cmd": "renderer_cmd",
    "poster.columns": "poster_columns",
    "poster.lambda": "poster_lambda",
    "poster.s_min": "poster_s_min",
    "llm_split": "llm_split",
    "llm_template_select": "llm_template_select",
    "use_vlm_audit": "use_vlm_audit",
}


def build_config(
    input_dir: Path,
    config_file: Path | None = None,
    cli_overrides: dict[str, object] | None = None,
) -> RunConfig:
    cfg = RunConfig(input_dir=input_dir)

    if config_file is None:
        candidate = input_dir / "paperx.toml"
        config_file = candidate if candidate.exists() else None
    if config_file is not None:
        values = read_config_file(config_file)
        updates: dict[str, object] = {}
        for key, value in values.items():
            if key in _FILE_KEYS:
                updates[_FILE_KEYS[key]] = value
            elif key == "poster.canvas":
                updates["poster_canvas"] = parse_canvas(str(value))
            elif key == "poster.font_range":
                lo, _, hi = str(value).partition("-")
                updates["poster_font_range"] = (float(lo), float(hi))
            elif key.startswith("temperature."):
                cfg.temperatures[key.split(".", 1)[1]] = float(value)  # type: ignore[arg-type]
            elif key.startswith("prices."):
                model, _, side = key[len("prices.") :].rpartition(".")
                if side not in ("input_per_1k", "output_per_1k") or not model:
                    raise ConfigError(f"unknown price key '{key}'")
                p_in, p_out = cfg.prices.get(model, (0.0, 0.0))
                pair = (float(value), p_out) if side == "input_per_1k" else (p_in, float(value))  # type: ignore[arg-type]
                cfg.prices[model] = pair
            else:
                raise ConfigError(f"unknown config key '{key}'")
        cfg = replace(cfg, **updates)  # type: ignore[arg-type]

    env_model = os.environ.get(ENV_MODEL)
    if env_model:
        cfg = replace(cfg, llm_model=env_model)
    # ENV_BASE_URL is consumed by the transport directly.
    _ = ENV_BASE_URL

    if cli_overrides:
        cfg = replace(cfg, **{k: v for k, v in cli_overrides.items() if v is not None})
    return cfg
