"""Shared fixtures: fixture bundles, scripted gateways, replay-built dags."""

from __future__ import annotations

from pathlib import Path

import pytest

from paperx.config import RunConfig
from paperx.dag import ScholarDag
from paperx.gateway import ChatRequest, ChatResponse, CostLedger, Gateway, Transcript
from scripted_llm import ScriptedTransport

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES_DIR = TESTS_DIR / "fixtures"
BUNDLES_DIR = FIXTURES_DIR / "bundles"
TRANSCRIPTS_DIR = FIXTURES_DIR / "transcripts"

BUNDLE_NAMES = ("alpha", "beta", "gamma")


def make_scripted_gateway() -> Gateway:
    return Gateway(Transcript("live"), CostLedger(), ScriptedTransport())


class SequenceTransport:
    """Canned responses in order; fails loudly when exhausted."""

    def __init__(self, responses: list[str]):
        self.responses = list(responses)
        self.calls = 0

    def __call__(self, request: ChatRequest) -> ChatResponse:
        if not self.responses:
            raise AssertionError("SequenceTransport ran out of canned responses")
        self.calls += 1
        text = self.responses.pop(0)
        return ChatResponse(text=text, input_tokens=10, output_tokens=10)


def make_sequence_gateway(responses: list[str]) -> tuple[Gateway, SequenceTransport]:
    transport = SequenceTransport(responses)
    return Gateway(Transcript("live"), CostLedger(), transport), transport


@pytest.fixture
def scripted_gateway() -> Gateway:
    return make_scripted_gateway()


@pytest.fixture
def alpha_bundle() -> Path:
    return BUNDLES_DIR / "alpha"


def replay_config(name: str, out_dir: Path, **overrides) -> RunConfig:
    return RunConfig(
        input_dir=BUNDLES_DIR / name,
        out_dir=out_dir,
        transcript_mode="replay",
        transcript_path=TRANSCRIPTS_DIR / f"{name}.jsonl",
        **overrides,
    )


def replay_gateway(name: str) -> Gateway:
    transcript = Transcript("replay", TRANSCRIPTS_DIR / f"{name}.jsonl")
    return Gateway(transcript, CostLedger())


@pytest.fixture(scope="session")
def built_dags(tmp_path_factory) -> dict[str, ScholarDag]:
    """Each fixture bundle built once per session through its transcript."""
    from paperx import paper2dag

    out: dict[str, ScholarDag] = {}
    for name in BUNDLE_NAMES:
        out_dir = tmp_path_factory.mktemp(f"dag-{name}")
        cfg = replay_config(name, out_dir)
        out[name] = paper2dag.build(cfg.input_dir, cfg, replay_gateway(name))
    return out


@pytest.fixture
def alpha_dag(built_dags) -> ScholarDag:
    return built_dags["alpha"]
