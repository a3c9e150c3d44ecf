"""Command-line entry point: build-dag, ppt, poster, pr, all, cost-report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import paper2dag, poster, ppt, pr, report
from .config import RunConfig, build_config, load_prices, parse_canvas
from .dag import ScholarDag, deserialize
from .errors import InputError, NoLedger, PaperxError
from .gateway import CostLedger, Gateway, Transcript

log = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", type=Path, default=Path("."), help="input bundle directory")
    parser.add_argument("--out", type=Path, default=None, help="output directory (default <input>/out)")
    parser.add_argument("--config", type=Path, default=None, help="paperx.toml config file")
    parser.add_argument("--model", default=None, help="chat model id")
    parser.add_argument("--vlm-model", default=None, help="vision model id (defaults to --model)")
    parser.add_argument("--max-depth", type=int, default=None, help="maximum dag depth (1-4)")
    parser.add_argument("--refine-iters", type=int, default=None, help="max slide refinement audits")
    parser.add_argument("--record", type=Path, default=None, metavar="PATH", help="record transcript to PATH")
    parser.add_argument("--replay", type=Path, default=None, metavar="PATH", help="replay transcript from PATH")
    parser.add_argument("--renderer-cmd", default=None, help="HTML-to-PNG command template")
    parser.add_argument("--prices", type=Path, default=None, help="price table JSON file")
    parser.add_argument("--no-llm-split", action="store_true", help="use the heading splitter instead of the model")


def _add_budget(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, default=None, help="traversal budget for this backend")


def _add_poster_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--canvas", default=None, metavar="WxH", help="poster canvas size")
    parser.add_argument("--columns", type=int, default=None, help="poster column count")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="coverage weight in the score")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paperx",
        description="Compile a parsed paper bundle into slides, a poster, and a promotion post.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dag = sub.add_parser("build-dag", help="construct dag.json from the bundle")
    _add_common(p_dag)

    p_ppt = sub.add_parser("ppt", help="lower dag.json to a slide deck")
    _add_common(p_ppt)
    _add_budget(p_ppt)
    p_ppt.add_argument("--from-paper", action="store_true", help="build the dag first")

    p_poster = sub.add_parser("poster", help="lower dag.json to a poster")
    _add_common(p_poster)
    _add_budget(p_poster)
    _add_poster_flags(p_poster)
    p_poster.add_argument("--from-paper", action="store_true", help="build the dag first")

    p_pr = sub.add_parser("pr", help="lower dag.json to a promotion post")
    _add_common(p_pr)
    _add_budget(p_pr)
    p_pr.add_argument("--from-paper", action="store_true", help="build the dag first")

    p_all = sub.add_parser("all", help="build the dag then all three backends")
    _add_common(p_all)
    _add_poster_flags(p_all)

    p_cost = sub.add_parser("cost-report", help="print and export the token/cost report")
    p_cost.add_argument("--out", type=Path, required=True, help="output directory holding costs.csv")
    p_cost.add_argument("--figure", action="store_true", default=True, help="also render cost_report.png")
    p_cost.add_argument("--no-figure", dest="figure", action="store_false")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides: dict[str, object] = {
        "out_dir": args.out,
        "llm_model": args.model,
        "vlm_model": args.vlm_model,
        "max_depth": args.max_depth,
        "refine_iters": args.refine_iters,
        "renderer_cmd": args.renderer_cmd,
    }
    if args.record is not None and args.replay is not None:
        raise InputError("--record and --replay are mutually exclusive")
    if args.record is not None:
        overrides["transcript_mode"] = "record"
        overrides["transcript_path"] = args.record
    elif args.replay is not None:
        overrides["transcript_mode"] = "replay"
        overrides["transcript_path"] = args.replay
    if args.prices is not None:
        overrides["prices"] = load_prices(args.prices)
    if args.no_llm_split:
        overrides["llm_split"] = False
    if getattr(args, "canvas", None):
        overrides["poster_canvas"] = parse_canvas(args.canvas)
    if getattr(args, "columns", None):
        overrides["poster_columns"] = args.columns
    if getattr(args, "lam", None) is not None:
        overrides["poster_lambda"] = args.lam
    budget = getattr(args, "budget", None)
    if budget is not None:
        key = {"ppt": "ppt_k", "poster": "poster_k", "pr": "pr_k"}.get(args.command)
        if key:
            overrides[key] = budget
    return build_config(args.input, args.config, overrides)


def make_gateway(cfg: RunConfig) -> Gateway:
    transcript = Transcript(cfg.transcript_mode, cfg.transcript_path)
    return Gateway(transcript, CostLedger(cfg.prices))


def load_dag(cfg: RunConfig) -> ScholarDag:
    path = cfg.resolved_out_dir / "dag.json"
    if not path.exists():
        raise InputError(
            f"{path} not found; run 'paperx build-dag' first or pass --from-paper"
        )
    return deserialize(path.read_bytes())


def _finish_run(cfg: RunConfig, gw: Gateway, stage: str, outputs: list[str], warnings: list[str]) -> None:
    out = cfg.resolved_out_dir
    out.mkdir(parents=True, exist_ok=True)
    gw.ledger.export_csv(out / "costs.csv")
    record = {"command": stage, "outputs": outputs, "warnings": warnings}
    with open(out / "run_report.jsonl", "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def cmd_build_dag(cfg: RunConfig, gw: Gateway) -> int:
    dag = paper2dag.build(cfg.input_dir, cfg, gw)
    _finish_run(cfg, gw, "build-dag", ["dag.json", "build.log"], [])
    print(f"dag.json written: {len(dag.text_nodes)} text nodes, {len(dag.visual_nodes)} visuals")
    return 0


def cmd_ppt(cfg: RunConfig, gw: Gateway, dag: ScholarDag | None = None) -> int:
    dag = dag or load_dag(cfg)
    warnings: list[str] = []
    deck = ppt.build_deck(dag, gw, cfg, warnings)
    ppt.export_deck(deck, cfg.resolved_out_dir, cfg.input_dir, cfg.renderer_cmd)
    _finish_run(cfg, gw, "ppt", [f"slides/{i:03d}.html" for i in range(1, len(deck) + 1)] + ["deck.json"], warnings)
    print(f"deck written: {len(deck)} slides")
    return 0


def cmd_poster(cfg: RunConfig, gw: Gateway, dag: ScholarDag | None = None) -> int:
    dag = dag or load_dag(cfg)
    warnings: list[str] = []
    layout = poster.build_poster(dag, gw, cfg, warnings)
    out = cfg.resolved_out_dir
    _copy_visual_files(dag, cfg)
    poster.export_poster(layout, out, cfg.poster_lambda)
    _finish_run(cfg, gw, "poster", ["poster.html", "poster.json"], warnings)
    print(
        f"poster written: {len(layout.sections)} sections, font {layout.font_pt:g}pt, "
        f"score {poster.score(layout, cfg.poster_lambda):.3f}"
    )
    return 0


def cmd_pr(cfg: RunConfig, gw: Gateway, dag: ScholarDag | None = None) -> int:
    dag = dag or load_dag(cfg)
    warnings: list[str] = []
    doc = pr.build_pr(dag, gw, cfg, warnings)
    _copy_visual_files(dag, cfg)
    pr.export_pr(doc, cfg.resolved_out_dir)
    _finish_run(cfg, gw, "pr", ["pr.md", "pr.json"], warnings)
    print(f"pr.md written: {len(doc.sections)} sections")
    return 0


def cmd_all(cfg: RunConfig, gw: Gateway) -> int:
    dag = paper2dag.build(cfg.input_dir, cfg, gw)
    _finish_run(cfg, gw, "build-dag", ["dag.json", "build.log"], [])
    cmd_ppt(cfg, gw, dag)
    cmd_poster(cfg, gw, dag)
    cmd_pr(cfg, gw, dag)
    ledger_csv = cfg.resolved_out_dir / "costs.csv"
    gw.ledger.export_csv(ledger_csv)
    print(report.cost_table(gw.ledger))
    return 0


def cmd_cost_report(out_dir: Path, figure: bool = True) -> int:
    csv_path = out_dir / "costs.csv"
    if not csv_path.exists():
        raise NoLedger(f"no ledger at {csv_path}; run a pipeline command first")
    ledger = CostLedger.load_csv(csv_path)
    print(report.cost_table(ledger))
    report.export_report_csv(ledger, out_dir / "cost_report.csv")
    if figure:
        report.render_cost_figure(ledger, out_dir / "cost_report.png")
    return 0


def _copy_visual_files(dag: ScholarDag, cfg: RunConfig) -> None:
    """Copy referenced images under out/ so exports stay self-contained."""
    import shutil

    for vis in dag.visual_nodes.values():
        source = cfg.input_dir / vis.path
        target = cfg.resolved_out_dir / vis.path
        if source.exists() and not target.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(source, target)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = make_parser().parse_args(argv)
    try:
        if args.command == "cost-report":
            return cmd_cost_report(args.out, args.figure)
        cfg = config_from_args(args)
        gw = make_gateway(cfg)
        if args.command == "build-dag":
            return cmd_build_dag(cfg, gw)
        dag = None
        if getattr(args, "from_paper", False):
            dag = paper2dag.build(cfg.input_dir, cfg, gw)
        if args.command == "ppt":
            return cmd_ppt(cfg, gw, dag)
        if args.command == "poster":
            return cmd_poster(cfg, gw, dag)
        if args.command == "pr":
            return cmd_pr(cfg, gw, dag)
        if args.command == "all":
            return cmd_all(cfg, gw)
        raise InputError(f"unknown command {args.command}")
    except PaperxError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"io error [{args.command}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
