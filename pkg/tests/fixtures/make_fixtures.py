#!/usr/bin/env python3
"""Regenerate the fixture bundles and their replay transcripts.

Run from anywhere:  python tests/fixtures/make_fixtures.py

Bundles are small synthetic papers in the converter's output layout
(paper.md + images/). Transcripts are recorded by running the real
pipeline against the scripted model, so replaying them offline drives the
exact same code paths deterministically.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent
sys.path.insert(0, str(FIXTURES.parent))

from PIL import Image, ImageDraw

from paperx.cli import cmd_all, cmd_build_dag
from paperx.config import RunConfig
from paperx.gateway import CostLedger, Gateway, Transcript
from scripted_llm import ScriptedTransport

ALPHA_MD = """\
# Dual Route Compression for Streaming Graph Queries

Ada Lovelace, Edsger Dijkstra, Grace Hopper

# Abstract

We present a dual route compression scheme for streaming graph queries. The
scheme is evaluated on three workloads and outperforms the strongest baseline.

# 1 Introduction

Streaming graph queries arrive faster than classical engines can index them.
Existing compressors treat topology and payload as one stream, which wastes
bandwidth on redundant structure. We separate the two concerns into a dual
route design, as shown in Figure 1. The topology route keeps a delta encoded
adjacency sketch. The payload route batches attribute updates into aligned
columns. Both routes share one dictionary, so decompression stays single pass.
This split reduces end to end latency on every workload we measured.

![](images/fig1.png)

Figure 1: Overview of the dual route compression pipeline.

# 2 Related Work

Graph sketching has a long history in the streaming literature. Earlier
systems compressed whole snapshots and required full reloads on updates.

# 3 Method

Our method maintains two cooperating encoders over one shared dictionary.
The topology encoder consumes edge events and emits fixed width deltas.
The payload encoder buffers attribute writes until a column fills. A column
flush triggers the merge step described below. The merge step interleaves
both streams while preserving arrival order within each vertex group. The
update rule for the shared dictionary is given by Equation 1. Each flush
renormalizes the code lengths so frequent symbols stay short. Decoding walks
the interleaved stream once and never materializes the full graph. Figure 2
illustrates the merge step on a small example. Worst case space stays within
a constant factor of the entropy bound.

![](images/eq1.png)

Equation 1: shared dictionary update with renormalized code lengths.

![](images/fig2.png)

Figure 2: The merge step interleaving topology and payload streams.

# 4 Experiments

We evaluate on three public streams with bursty arrival patterns. The dual
route design reduces median latency by 41 percent against the strongest
baseline. Throughput scales linearly up to sixteen workers. Ablations show
the shared dictionary contributes most of the gain. Figure 3 plots latency
against arrival rate for all systems. Memory stays flat because columns are
recycled after every flush.

![](images/fig3.png)

Figure 3: Latency versus arrival rate across all evaluated systems.

# 5 Conclusion

Dual route compression separates topology from payload and wins on both
latency and space, as Figure 1 summarizes. The gains in Figure 3 hold across
every arrival rate. Future work extends the dictionary to weighted graphs.

# References

[1] A survey of streaming graph systems.
[2] Entropy coding for evolving structures.
"""

BETA_MD = """\
# Calibrated Label Noise Schedules for Robust Distillation

Mary Shelley, Alan Turing

# Abstract

We study label noise schedules for distillation and give a calibration rule.

# 1 Introduction

Distillation transfers knowledge from a large teacher to a small student.
Real labels carry noise that the teacher amplifies during transfer. We ask
when injected noise helps rather than hurts the student. Our answer is a
schedule calibrated to the teacher's margin distribution. The schedule needs
no extra passes over the data. It works with any softmax teacher.

# 2 Method

The schedule starts from the teacher margin histogram computed on a held out
shard. Margins below the first quartile receive no injected noise. Margins
above the median receive noise proportional to their excess confidence. The
proportionality constant is fit once by matching the student's early loss
curve. We clip the injected noise at a fixed ceiling to keep gradients
bounded. The whole procedure adds one scalar per batch to the training loop.

# 3 Results

Across four benchmarks the calibrated schedule beats constant noise at every
budget. Gains concentrate where teacher confidence is poorly calibrated.
Student accuracy improves by up to two points without extra compute. The
schedule also shortens fine tuning by a third on average.

# 4 Conclusion

Calibrated noise schedules make distillation robust to teacher overconfidence.
The rule is cheap, architecture agnostic, and easy to adopt.

# Acknowledgements

We thank the anonymous reviewers for their careful reading.
"""

GAMMA_MD = """\
# Sparse Voxel Caches for Interactive Terrain Editing

Rosalind Franklin

# 1 Introduction

Interactive terrain editors redraw large voxel regions after every brush
stroke. Naive caches invalidate whole chunks and stall the frame loop. We
cache sparse voxel bricks keyed by brush footprint instead. Hits stay local
to the edited region, so frames never stall.

# 2 Approach

Each brick stores a compressed occupancy mask plus a material palette. The
cache evicts bricks by a clock policy weighted by edit frequency. A brush
stroke touches at most a bounded number of bricks, shown in Figure 1. Redraw
cost therefore tracks the stroke size rather than the terrain size. The
editor stays interactive even on planet scale maps.

![](images/g1.png)

Figure 1: Bricks touched by a single brush stroke.
"""


def _png(path: Path, size: tuple[int, int], color: str, accent: str) -> None:
    img = Image.new("RGB", size, color)
    draw = ImageDraw.Draw(img)
    w, h = size
    draw.rectangle([w // 8, h // 8, w - w // 8, h - h // 8], outline=accent, width=4)
    draw.line([0, h - 1, w - 1, 0], fill=accent, width=3)
    path.parent.mkdir(parents=True, exist_ok=True)
    img.save(path)


def write_bundles(root: Path) -> None:
    alpha = root / "bundles" / "alpha"
    alpha.mkdir(parents=True, exist_ok=True)
    (alpha / "paper.md").write_text(ALPHA_MD, encoding="utf-8")
    _png(alpha / "images" / "fig1.png", (800, 500), "#dce7f5", "#16325c")
    _png(alpha / "images" / "eq1.png", (900, 120), "#f5f0dc", "#5c4716")
    _png(alpha / "images" / "fig2.png", (600, 600), "#dcf5e4", "#165c2e")
    _png(alpha / "images" / "fig3.png", (400, 700), "#f5dcdc", "#5c1616")

    beta = root / "bundles" / "beta"
    beta.mkdir(parents=True, exist_ok=True)
    (beta / "paper.md").write_text(BETA_MD, encoding="utf-8")

    gamma = root / "bundles" / "gamma"
    gamma.mkdir(parents=True, exist_ok=True)
    (gamma / "paper.md").write_text(GAMMA_MD, encoding="utf-8")
    _png(gamma / "images" / "g1.png", (640, 480), "#e8dcf5", "#3c165c")


def record(root: Path) -> None:
    transcripts = root / "transcripts"
    transcripts.mkdir(parents=True, exist_ok=True)
    for name, full in (("alpha", True), ("beta", False), ("gamma", False)):
        bundle = root / "bundles" / name
        transcript_path = transcripts / f"{name}.jsonl"
        transcript_path.unlink(missing_ok=True)
        out_dir = root / "_record_out" / name
        if out_dir.exists():
            shutil.rmtree(out_dir)
        cfg = RunConfig(
            input_dir=bundle,
            out_dir=out_dir,
            transcript_mode="record",
            transcript_path=transcript_path,
        )
        gw = Gateway(Transcript("record", transcript_path), CostLedger(), ScriptedTransport())
        if full:
            cmd_all(cfg, gw)
        else:
            cmd_build_dag(cfg, gw)
        print(f"recorded {transcript_path.name}: {len(gw.transcript.entries)} entries")
    shutil.rmtree(root / "_record_out", ignore_errors=True)


def main() -> None:
    write_bundles(FIXTURES)
    record(FIXTURES)


if __name__ == "__main__":
    main()
