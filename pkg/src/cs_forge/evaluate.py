"""WER scoring and experiment-matrix reporting.

Transcripts are normalized (lowercased, punctuation stripped except
intra-word apostrophes and the ela geminada dot), aligned with a
unit-cost dynamic program, and pooled corpus-level: 100·Σ(S+D+I)/Σ|ref|
rather than the mean of per-utterance rates. The mean is also computed
for comparison since the two disagree whenever utterance lengths vary.

Result records aggregate into the experiment × decoding-tokens matrix
(one column per test set); the published numbers ship as a data fixture
for the analysis helpers, as inputs rather than reproduced claims.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Manifest, read_records
from .errors import ConfigError, ManifestError

EXPERIMENTS = ("base", "synthetic", "tv3", "tuples")
EXPERIMENT_LABELS = {
    "base": "Base model",
    "synthetic": "Synthetic data",
    "tv3": "TV3",
    "tuples": "Tuples",
}
TOKEN_ORDER: tuple[tuple[str, ...], ...] = (
    (),
    ("ca", "es"),
    ("es", "ca"),
    ("ca",),
    ("es",),
)
DATASET_ORDER = ("TV3", "ParlamentParla", "Corts")

_KEEP_CHARS = frozenset("'’·")


@dataclass(frozen=True)
class AlignmentCounts:
    """One optimal alignment, decomposed into the standard edit ops."""

    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_len: int = 0

    def __post_init__(self) -> None:
        for name in ("substitutions", "deletions", "insertions", "ref_len"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.substitutions + self.deletions > self.ref_len:
            raise ValueError("substitutions + deletions cannot exceed ref_len")

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "AlignmentCounts") -> "AlignmentCounts":
        return AlignmentCounts(
            substitutions=self.substitutions + other.substitutions,
            deletions=self.deletions + other.deletions,
            insertions=self.insertions + other.insertions,
            ref_len=self.ref_len + other.ref_len,
        )


@dataclass(frozen=True)
class UtteranceWer:
    utterance_id: str
    wer_pct: float
    counts: AlignmentCounts


@dataclass(frozen=True)
class EvalRecord:
    """One cell of the results matrix, plus optional scoring detail."""

    experiment: str
    decoding_tokens: tuple[str, ...]
    dataset: str
    wer_pct: float
    counts: AlignmentCounts | None = field(default=None, compare=False)
    mean_utterance_wer_pct: float | None = field(default=None, compare=False)
    n_utterances: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "decoding_tokens", tuple(self.decoding_tokens))
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment {self.experiment!r} not in {EXPERIMENTS}")
        if self.decoding_tokens not in TOKEN_ORDER:
            raise ConfigError(f"unsupported decoding tokens {self.decoding_tokens}")
        if not self.dataset:
            raise ConfigError("dataset must be nonempty")
        if self.wer_pct < 0:
            raise ConfigError(f"wer_pct must be >= 0, got {self.wer_pct}")

    def to_record(self) -> dict:
        return {
            "experiment": self.experiment,
            "decoding_tokens": list(self.decoding_tokens),
            "dataset": self.dataset,
            "wer_pct": self.wer_pct,
        }

    @classmethod
    def from_record(cls, record: dict) -> "EvalRecord":
        try:
            return cls(
                experiment=record["experiment"],
                decoding_tokens=tuple(record["decoding_tokens"]),
                dataset=record["dataset"],
                wer_pct=float(record["wer_pct"]),
            )
        except KeyError as exc:
            raise ConfigError(f"result record missing key {exc.args[0]!r}") from exc


def normalize_transcript(text: str) -> list[str]:
    """Lowercase, drop punctuation (keeping l'apòstrof and l·l), split."""
    cleaned = [
        ch if ch.isalnum() or ch in _KEEP_CHARS else " "
        for ch in text.lower()
    ]
    words = []
    for raw in "".join(cleaned).split():
        word = raw.strip("'’·")
        if word:
            words.append(word)
    return words


def wer(ref_words: Sequence[str], hyp_words: Sequence[str]) -> tuple[float, AlignmentCounts]:
    """Minimal-edit WER with unit costs and one recovered alignment.

    Traceback prefers the diagonal, then deletion, then insertion, which
    keeps the substitution count stable when ref and hyp are swapped.
    """
    if not ref_words:
        raise ConfigError("WER needs a nonempty reference")
    n_ref, n_hyp = len(ref_words), len(hyp_words)
    dist = [[0] * (n_hyp + 1) for _ in range(n_ref + 1)]
    for i in range(1, n_ref + 1):
        dist[i][0] = i
    for j in range(1, n_hyp + 1):
        dist[0][j] = j
    for i in range(1, n_ref + 1):
        row, prev = dist[i], dist[i - 1]
        ref_word = ref_words[i - 1]
        for j in range(1, n_hyp + 1):
            diagonal = prev[j - 1] + (ref_word != hyp_words[j - 1])
            row[j] = min(diagonal, prev[j] + 1, row[j - 1] + 1)

    substitutions = deletions = insertions = 0
    i, j = n_ref, n_hyp
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0 and here == dist[i - 1][j - 1] + (ref_words[i - 1] != hyp_words[j - 1]):
            substitutions += ref_words[i - 1] != hyp_words[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and here == dist[i - 1][j] + 1:
            deletions += 1
            i -= 1
        else:
            insertions += 1
            j -= 1
    counts = AlignmentCounts(
        substitutions=substitutions,
        deletions=deletions,
        insertions=insertions,
        ref_len=n_ref,
    )
    return 100.0 * counts.errors / n_ref, counts


def load_hypotheses(path: str | Path) -> dict[str, str]:
    """Read {"id", "hyp"} lines into an id → hypothesis map."""
    hyps: dict[str, str] = {}
    for lineno, record in enumerate(read_records(path), start=1):
        try:
            utt_id, hyp = record["id"], record["hyp"]
        except KeyError as exc:
            raise ManifestError(f"{path}:{lineno}: hypothesis missing key {exc.args[0]!r}") from exc
        if utt_id in hyps:
            raise ManifestError(f"{path}:{lineno}: duplicate hypothesis for id {utt_id!r}")
        hyps[utt_id] = hyp
    return hyps


def utterance_wers(
    refs: Manifest,
    hyps: Mapping[str, str],
    *,
    normalize: bool = True,
) -> list[UtteranceWer]:
    """Score each hypothesis against its reference, in manifest order."""
    if not hyps:
        raise ConfigError("no hypotheses to score")
    by_id = {u.id: u for u in refs}
    for utt_id in hyps:
        if utt_id not in by_id:
            raise ManifestError(f"hypothesis references unknown utterance id {utt_id!r}")
    scored = []
    for utterance in refs:
        if utterance.id not in hyps:
            continue
        ref_words = normalize_transcript(utterance.text) if normalize else utterance.text.split()
        if not ref_words:
            raise ConfigError(f"utterance {utterance.id!r} has an empty reference after normalization")
        hyp_text = hyps[utterance.id]
        hyp_words = normalize_transcript(hyp_text) if normalize else hyp_text.split()
        pct, counts = wer(ref_words, hyp_words)
        scored.append(UtteranceWer(utterance_id=utterance.id, wer_pct=pct, counts=counts))
    return scored


def evaluate_set(
    refs: Manifest,
    hyps: Mapping[str, str],
    *,
    experiment: str = "base",
    decoding_tokens: Sequence[str] = (),
    dataset: str | None = None,
    normalize: bool = True,
) -> EvalRecord:
    """Pool all hypothesis alignments into one corpus-level WER record."""
    scored = utterance_wers(refs, hyps, normalize=normalize)
    pooled = AlignmentCounts()
    for entry in scored:
        pooled = pooled + entry.counts
    return EvalRecord(
        experiment=experiment,
        decoding_tokens=tuple(decoding_tokens),
        dataset=dataset if dataset is not None else refs.source_name,
        wer_pct=100.0 * pooled.errors / pooled.ref_len,
        counts=pooled,
        mean_utterance_wer_pct=sum(e.wer_pct for e in scored) / len(scored),
        n_utterances=len(scored),
    )


def format_tokens(tokens: Sequence[str]) -> str:
    return "".join(f"<{lang}>" for lang in tokens)


def _cell_map(records: Iterable[EvalRecord]) -> dict[tuple[str, tuple[str, ...], str], float]:
    cells: dict[tuple[str, tuple[str, ...], str], float] = {}
    for record in records:
        key = (record.experiment, record.decoding_tokens, record.dataset)
        if key in cells and cells[key] != record.wer_pct:
            raise ConfigError(
                f"conflicting results for {record.experiment} "
                f"{format_tokens(record.decoding_tokens) or '(none)'} on {record.dataset}: "
                f"{cells[key]} vs {record.wer_pct}"
            )
        cells[key] = record.wer_pct
    return cells


def _dataset_columns(cells: Mapping[tuple[str, tuple[str, ...], str], float]) -> list[str]:
    present = {dataset for _, _, dataset in cells}
    ordered = [d for d in DATASET_ORDER if d in present]
    ordered.extend(sorted(present - set(DATASET_ORDER)))
    return ordered


def results_table(records: Iterable[EvalRecord]) -> str:
    """Align records into the experiment × decoding-tokens matrix."""
    cells = _cell_map(records)
    datasets = _dataset_columns(cells)
    header = ["Experiment", "Decoding Tokens", *datasets]
    rows: list[list[str]] = []
    for experiment in EXPERIMENTS:
        first_of_group = True
        for tokens in TOKEN_ORDER:
            values = [cells.get((experiment, tokens, dataset)) for dataset in datasets]
            if not any(v is not None for v in values):
                continue
            rows.append(
                [
                    EXPERIMENT_LABELS[experiment] if first_of_group else "",
                    format_tokens(tokens),
                    *["" if v is None else f"{v:.2f}" for v in values],
                ]
            )
            first_of_group = False

    widths = [len(h) for h in header]
    for row in rows:
        for col, value in enumerate(row):
            widths[col] = max(widths[col], len(value))
    def render(row: list[str]) -> str:
        parts = [row[0].ljust(widths[0]), row[1].ljust(widths[1])]
        parts.extend(value.rjust(widths[col + 2]) for col, value in enumerate(row[2:]))
        return "  ".join(parts).rstrip()

    lines = [render(header), "-" * (sum(widths) + 2 * (len(widths) - 1))]
    lines.extend(render(row) for row in rows)
    return "\n".join(lines)


def results_lines(records: Iterable[EvalRecord]) -> list[str]:
    """Machine-readable form: one canonical JSON line per populated cell."""
    cells = _cell_map(records)
    lines = []
    for experiment in EXPERIMENTS:
        for tokens in TOKEN_ORDER:
            for dataset in _dataset_columns(cells):
                value = cells.get((experiment, tokens, dataset))
                if value is None:
                    continue
                lines.append(
                    json.dumps(
                        {
                            "experiment": experiment,
                            "decoding_tokens": list(tokens),
                            "dataset": dataset,
                            "wer_pct": value,
                        },
                        ensure_ascii=False,
                    )
                )
    return lines


def best_configuration(
    records: Iterable[EvalRecord],
    dataset: str,
) -> tuple[str, tuple[str, ...], float]:
    """The lowest-WER (experiment, decoding_tokens) for one test set.

    Ties break by table row order, so the answer is deterministic.
    """
    cells = _cell_map(records)
    candidates = [
        (value, EXPERIMENTS.index(experiment), TOKEN_ORDER.index(tokens), experiment, tokens)
        for (experiment, tokens, cell_dataset), value in cells.items()
        if cell_dataset == dataset
    ]
    if not candidates:
        raise ConfigError(f"no results for dataset {dataset!r}")
    value, _, _, experiment, tokens = min(candidates)
    return experiment, tokens, value


def load_results(path: str | Path) -> list[EvalRecord]:
    return [EvalRecord.from_record(record) for record in read_records(path)]


def load_published_results() -> list[EvalRecord]:
    """The published WER matrix that ships with the package."""
    text = resources.files("cs_forge").joinpath("data/published_wer.jsonl").read_text("utf-8")
    return [EvalRecord.from_record(json.loads(line)) for line in text.splitlines() if line.strip()]


__all__ = [
    "AlignmentCounts",
    "EvalRecord",
    "UtteranceWer",
    "normalize_transcript",
    "wer",
    "load_hypotheses",
    "utterance_wers",
    "evaluate_set",
    "results_table",
    "results_lines",
    "best_configuration",
    "format_tokens",
    "load_results",
    "load_published_results",
    "EXPERIMENTS",
    "TOKEN_ORDER",
    "DATASET_ORDER",
]
