"""Report rendering: delimited tables plus matplotlib figures.

Every report writes a tab-separated summary and saves the figures next to
it, so runs are easy to diff and easy to eyeball.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .dataset.schema import CorpusStats, GameRecord, SingleTurnSample


def _instruction_lengths(records: Sequence) -> list[int]:
    lengths: list[int] = []
    for rec in records:
        if isinstance(rec, SingleTurnSample):
            lengths.append(len(rec.instruction.split()))
        elif isinstance(rec, GameRecord):
            lengths.extend(len(u.split()) for u in rec.architect_utterances())
    return lengths


def write_tsv(path: Path, rows: Sequence[Sequence], header: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join("" if v is None else str(v) for v in row) + "\n")


def stats_report(stats: CorpusStats, records: Sequence, out_dir: Union[str, Path]) -> list[Path]:
    """Write stats.tsv plus distribution figures; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    tsv = out / "stats.tsv"
    items = [(k, v) for k, v in stats.as_dict().items() if v is not None]
    write_tsv(tsv, items, header=("field", "value"))
    written.append(tsv)

    lengths = _instruction_lengths(records)
    if lengths:
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(lengths, bins=range(0, max(lengths) + 2), color="#4878a8", edgecolor="white")
        ax.set_xlabel("instruction length (words)")
        ax.set_ylabel("count")
        ax.set_title("Instruction lengths")
        fig.tight_layout()
        path = out / "instruction_lengths.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)

    if records and isinstance(records[0], SingleTurnSample):
        clear = sum(1 for r in records if r.clear)
        fig, ax = plt.subplots(figsize=(4.5, 4))
        ax.bar(["clear", "ambiguous"], [clear, len(records) - clear], color=["#4878a8", "#d1605e"])
        ax.set_ylabel("instructions")
        ax.set_title("Clarity judgments")
        fig.tight_layout()
        path = out / "label_balance.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    elif records and isinstance(records[0], GameRecord):
        durations = [r.duration_minutes for r in records]
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(durations, bins=12, color="#4878a8", edgecolor="white")
        ax.set_xlabel("game duration (minutes)")
        ax.set_ylabel("games")
        ax.set_title("Game durations")
        fig.tight_layout()
        path = out / "game_durations.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def ranking_report(
    per_query: Sequence[tuple[str, int]],
    mrr: float,
    method: str,
    out_dir: Union[str, Path],
    k: int = 20,
) -> list[Path]:
    """Per-query gold ranks as TSV plus a rank histogram figure.

    ``per_query`` holds (query id, gold rank) with rank 0 meaning the gold
    fell outside the cut-off.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    tsv = out / "ranking.tsv"
    rows = [
        (qid, rank if rank > 0 else "", f"{1.0 / rank:.4f}" if rank > 0 else "0.0000")
        for qid, rank in per_query
    ]
    write_tsv(tsv, rows, header=("query", "gold_rank", "reciprocal_rank"))
    written.append(tsv)

    ranks = [rank for _, rank in per_query if rank > 0]
    misses = sum(1 for _, rank in per_query if rank == 0)
    fig, ax = plt.subplots(figsize=(6, 4))
    if ranks:
        ax.hist(ranks, bins=range(1, k + 2), color="#4878a8", edgecolor="white")
    ax.set_xlabel(f"gold rank (cut-off {k}; {misses} beyond)")
    ax.set_ylabel("queries")
    ax.set_title(f"{method}: MRR@{k} = {mrr:.4f}")
    fig.tight_layout()
    path = out / "gold_ranks.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written
