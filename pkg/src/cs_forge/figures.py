"""Chart rendering for evaluation reports.

Everything draws through the Agg backend straight to files, so reports
can be produced on headless machines alongside their delimited output.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import ConfigError
from .evaluate import (
    EXPERIMENT_LABELS,
    EXPERIMENTS,
    TOKEN_ORDER,
    EvalRecord,
    UtteranceWer,
    _cell_map,
    _dataset_columns,
    format_tokens,
)


def render_results_chart(records: Iterable[EvalRecord], out_path: str | Path) -> Path:
    """Grouped WER bars, one panel per test set, one bar per experiment."""
    cells = _cell_map(records)
    if not cells:
        raise ConfigError("no results to chart")
    datasets = _dataset_columns(cells)
    token_configs = [
        tokens
        for tokens in TOKEN_ORDER
        if any(key[1] == tokens for key in cells)
    ]
    experiments = [
        experiment
        for experiment in EXPERIMENTS
        if any(key[0] == experiment for key in cells)
    ]

    fig, axes = plt.subplots(
        1, len(datasets), figsize=(4.2 * len(datasets), 3.6), sharey=True, squeeze=False
    )
    positions = np.arange(len(token_configs))
    width = 0.8 / max(len(experiments), 1)
    for axis, dataset in zip(axes[0], datasets):
        for slot, experiment in enumerate(experiments):
            values = [
                cells.get((experiment, tokens, dataset), np.nan) for tokens in token_configs
            ]
            axis.bar(
                positions + slot * width,
                values,
                width=width,
                label=EXPERIMENT_LABELS[experiment],
            )
        axis.set_title(dataset)
        axis.set_xticks(positions + width * (len(experiments) - 1) / 2)
        axis.set_xticklabels(
            [format_tokens(tokens) or "(none)" for tokens in token_configs],
            rotation=30,
            ha="right",
        )
        axis.grid(axis="y", alpha=0.3)
    axes[0][0].set_ylabel("WER (%)")
    axes[0][-1].legend(fontsize="small")
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_wer_histogram(
    scored: Sequence[UtteranceWer],
    out_path: str | Path,
    *,
    title: str = "Per-utterance WER",
) -> Path:
    """Distribution of per-utterance WER for one scored set."""
    if not scored:
        raise ConfigError("no scored utterances to chart")
    values = [entry.wer_pct for entry in scored]
    fig, axis = plt.subplots(figsize=(6.4, 3.6))
    upper = max(100.0, max(values))
    axis.hist(values, bins=min(30, max(5, len(values) // 2)), range=(0.0, upper))
    axis.set_xlabel("WER (%)")
    axis.set_ylabel("utterances")
    axis.set_title(title)
    axis.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


__all__ = ["render_results_chart", "render_wer_histogram"]
