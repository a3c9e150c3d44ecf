"""Cost reporting: console table, CSV export, and a per-stage figure."""

from __future__ import annotations

from pathlib import Path

from .gateway import CostLedger, ledger_total


def cost_table(ledger: CostLedger) -> str:
    """Fixed-width table of per-stage kilotokens and cost, with a total row."""
    rows = []
    by_stage = ledger_total(ledger, "stage")
    for stage, (tin, tout, cost) in by_stage.items():
        rows.append((stage, tin / 1000, tout / 1000, cost))
    tin, tout, cost = ledger_total(ledger, "all")["all"]
    rows.append(("total", tin / 1000, tout / 1000, cost))

    header = f"{'stage':<16}{'in (K tok)':>12}{'out (K tok)':>12}{'cost ($)':>10}"
    lines = [header, "-" * len(header)]
    for stage, kin, kout, c in rows:
        lines.append(f"{stage:<16}{kin:>12.3f}{kout:>12.3f}{c:>10.2f}")
    return "\n".join(lines)


def export_report_csv(ledger: CostLedger, path: str | Path) -> Path:
    """Aggregated per-stage rows plus the total, as delimited output."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["stage,input_tokens,output_tokens,cost_usd"]
    by_stage = ledger_total(ledger, "stage")
    for stage, (tin, tout, cost) in by_stage.items():
        lines.append(f"{stage},{tin},{tout},{cost:.2f}")
    tin, tout, cost = ledger_total(ledger, "all")["all"]
    lines.append(f"total,{tin},{tout},{cost:.2f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def render_cost_figure(ledger: CostLedger, path: str | Path) -> Path:
    """Bar charts of per-stage token usage and cost, saved next to the CSV."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    by_stage = ledger_total(ledger, "stage")
    stages = list(by_stage)
    kin = [by_stage[s][0] / 1000 for s in stages]
    kout = [by_stage[s][1] / 1000 for s in stages]
    cost = [by_stage[s][2] for s in stages]

    fig, (ax_tok, ax_cost) = plt.subplots(1, 2, figsize=(11, 4.2))
    xs = range(len(stages))
    width = 0.38
    ax_tok.bar([x - width / 2 for x in xs], kin, width, label="input", color="#4c72b0")
    ax_tok.bar([x + width / 2 for x in xs], kout, width, label="output", color="#dd8452")
    ax_tok.set_xticks(list(xs))
    ax_tok.set_xticklabels(stages, rotation=30, ha="right", fontsize=8)
    ax_tok.set_ylabel("tokens (K)")
    ax_tok.set_title("Token usage by stage")
    ax_tok.legend(fontsize=8)

    ax_cost.bar(list(xs), cost, 0.6, color="#55a868")
    ax_cost.set_xticks(list(xs))
    ax_cost.set_xticklabels(stages, rotation=30, ha="right", fontsize=8)
    ax_cost.set_ylabel("cost (USD)")
    ax_cost.set_title("Cost by stage")

    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
