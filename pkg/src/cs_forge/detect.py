"""Code-switching candidate detection and the review acceptance rule.

Two detectors exist. The keyword detector flags utterances containing a
Spanish marker word (whole-word, case-insensitive) and leaves them pending
for manual review; acceptance then requires at least three consecutive
Spanish-labelled tokens, and that rule is enforced, not advisory. The
token-count detector accepts an utterance outright when both languages
contribute at least three tokens.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from .corpus import Manifest, Utterance
from .errors import AlreadyDecidedError, ConfigError, RuleViolationError
from .langid import LangCounts, LangLexicon, TaggedToken, tag_utterance

log = logging.getLogger(__name__)

MIN_RUN_ES = 3
MIN_WORDS_EACH = 3
LONG_UTTERANCE_S = 30.0

DETECTION_METHODS = ("keyword", "token_count")
STATUSES = ("pending", "accepted", "rejected")

DEFAULT_KEYWORDS = frozenset({"y"})


@dataclass(frozen=True)
class KeywordSet:
    """Lowercase Spanish marker words matched as whole tokens."""

    keywords: frozenset[str] = DEFAULT_KEYWORDS

    def __post_init__(self) -> None:
        object.__setattr__(self, "keywords", frozenset(self.keywords))
        if not self.keywords:
            raise ConfigError("keyword set must be nonempty")
        for kw in self.keywords:
            if kw != kw.lower():
                raise ConfigError(f"keyword {kw!r} must be lowercase")

    @classmethod
    def load(cls, path: str | Path) -> "KeywordSet":
        words = set()
        with Path(path).open("r", encoding="utf-8") as fh:
            for line in fh:
                word = line.strip().lower()
                if word:
                    words.add(word)
        return cls(keywords=frozenset(words))


@dataclass(frozen=True)
class CsCandidate:
    """An utterance flagged as possibly code-switched, with its evidence."""

    utterance_id: str
    tokens: tuple[TaggedToken, ...]
    counts: LangCounts
    max_run_es: int
    max_run_ca: int
    detection_method: str
    matched_keywords: tuple[tuple[str, tuple[int, int]], ...] = ()
    status: str = "pending"
    decided_by: str | None = None
    decided_at: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "matched_keywords", tuple(self.matched_keywords))
        if self.detection_method not in DETECTION_METHODS:
            raise ConfigError(f"unknown detection method {self.detection_method!r}")
        if self.status not in STATUSES:
            raise ConfigError(f"unknown status {self.status!r}")
        if self.max_run_es > self.counts.es or self.max_run_ca > self.counts.ca:
            raise ValueError("run length cannot exceed the language count")
        if self.status == "pending" and self.decided_by is not None:
            raise ValueError("pending candidate cannot carry a decision")


def max_consecutive_run(tokens: list[TaggedToken] | tuple[TaggedToken, ...], lang: str) -> int:
    """Length of the longest run of tokens labelled exactly ``lang``."""
    best = 0
    current = 0
    for token in tokens:
        if token.lang == lang:
            current += 1
            best = max(best, current)
        else:
            current = 0
    return best


def is_code_switched(counts: LangCounts, min_each: int = MIN_WORDS_EACH) -> bool:
    """True iff both languages contribute at least ``min_each`` tokens."""
    if min_each < 1:
        raise ConfigError("min_each must be at least 1")
    return counts.ca >= min_each and counts.es >= min_each


def keyword_candidates(
    utterance: Utterance,
    keywords: KeywordSet,
    lexicon: LangLexicon,
) -> CsCandidate | None:
    """Pending candidate when any keyword occurs as a whole token, else None."""
    if not utterance.text:
        return None
    tokens, counts = tag_utterance(utterance.text, lexicon)
    matched = tuple(
        (t.text.lower(), t.span) for t in tokens if t.text.lower() in keywords.keywords
    )
    if not matched:
        return None
    return CsCandidate(
        utterance_id=utterance.id,
        tokens=tuple(tokens),
        counts=counts,
        max_run_es=max_consecutive_run(tokens, "es"),
        max_run_ca=max_consecutive_run(tokens, "ca"),
        detection_method="keyword",
        matched_keywords=matched,
        status="pending",
    )


def token_count_candidate(
    utterance: Utterance,
    lexicon: LangLexicon,
    min_each: int = MIN_WORDS_EACH,
) -> CsCandidate | None:
    """Auto-accepted candidate when the >=3-words-each rule holds, else None."""
    tokens, counts = tag_utterance(utterance.text, lexicon)
    if not is_code_switched(counts, min_each):
        return None
    return CsCandidate(
        utterance_id=utterance.id,
        tokens=tuple(tokens),
        counts=counts,
        max_run_es=max_consecutive_run(tokens, "es"),
        max_run_ca=max_consecutive_run(tokens, "ca"),
        detection_method="token_count",
        status="accepted",
    )


def scan_corpus(
    manifest: Manifest,
    method: str,
    lexicon: LangLexicon,
    keywords: KeywordSet | None = None,
    min_each: int = MIN_WORDS_EACH,
) -> list[CsCandidate]:
    """Run one detector over every utterance of a manifest.

    Keyword candidates come back pending (they require manual verification);
    token-count candidates come back accepted.
    """
    if method not in DETECTION_METHODS:
        raise ConfigError(f"unknown detection method {method!r}")
    if method == "keyword" and keywords is None:
        keywords = KeywordSet()
    out: list[CsCandidate] = []
    for utterance in manifest:
        if utterance.duration_s is not None and utterance.duration_s > LONG_UTTERANCE_S:
            log.warning(
                "utterance %s is %.1f s long; detection assumes short clips",
                utterance.id,
                utterance.duration_s,
            )
        if method == "keyword":
            candidate = keyword_candidates(utterance, keywords, lexicon)
        else:
            candidate = token_count_candidate(utterance, lexicon, min_each)
        if candidate is not None:
            out.append(candidate)
    return out


def decide(
    candidate: CsCandidate,
    decision: str,
    annotator: str,
    decided_at: str | None = None,
) -> CsCandidate:
    """Apply a manual accept/reject to a pending candidate.

    Accepting a keyword-method candidate demands max_run_es >= 3; the rule
    is checked here so no caller can bypass it.
    """
    if decision not in ("accept", "reject"):
        raise ConfigError(f"decision must be 'accept' or 'reject', got {decision!r}")
    if candidate.status != "pending":
        raise AlreadyDecidedError(
            f"candidate {candidate.utterance_id!r} is already {candidate.status}"
        )
    if (
        decision == "accept"
        and candidate.detection_method == "keyword"
        and candidate.max_run_es < MIN_RUN_ES
    ):
        raise RuleViolationError(
            f"candidate {candidate.utterance_id!r}: accept requires at least "
            f"{MIN_RUN_ES} consecutive Spanish words, found {candidate.max_run_es}"
        )
    return replace(
        candidate,
        status="accepted" if decision == "accept" else "rejected",
        decided_by=annotator,
        decided_at=decided_at or datetime.now(timezone.utc).isoformat(),
    )


def candidate_to_record(candidate: CsCandidate, utterance: Utterance) -> dict[str, Any]:
    """Merge a candidate with its utterance into one manifest-format record."""
    rec = utterance.to_record()
    rec.update(
        {
            "status": candidate.status,
            "method": candidate.detection_method,
            "max_run_es": candidate.max_run_es,
            "max_run_ca": candidate.max_run_ca,
            "counts": candidate.counts.to_record(),
            "tokens": [
                {"text": t.text, "lang": t.lang, "start": t.start, "end": t.end}
                for t in candidate.tokens
            ],
            "matched_keywords": [
                {"keyword": kw, "start": span[0], "end": span[1]}
                for kw, span in candidate.matched_keywords
            ],
        }
    )
    if candidate.decided_by is not None:
        rec["decided_by"] = candidate.decided_by
    if candidate.decided_at is not None:
        rec["decided_at"] = candidate.decided_at
    return rec


def candidate_from_record(rec: dict[str, Any]) -> tuple[CsCandidate, Utterance]:
    """Inverse of candidate_to_record."""
    aug_keys = {
        "status",
        "method",
        "max_run_es",
        "max_run_ca",
        "counts",
        "tokens",
        "matched_keywords",
        "decided_by",
        "decided_at",
    }
    utterance = Utterance.from_record({k: v for k, v in rec.items() if k not in aug_keys})
    counts = LangCounts(**rec["counts"])
    tokens = tuple(
        TaggedToken(text=t["text"], start=t["start"], end=t["end"], lang=t["lang"])
        for t in rec["tokens"]
    )
    matched = tuple(
        (m["keyword"], (m["start"], m["end"])) for m in rec.get("matched_keywords", ())
    )
    candidate = CsCandidate(
        utterance_id=utterance.id,
        tokens=tokens,
        counts=counts,
        max_run_es=rec["max_run_es"],
        max_run_ca=rec["max_run_ca"],
        detection_method=rec["method"],
        matched_keywords=matched,
        status=rec["status"],
        decided_by=rec.get("decided_by"),
        decided_at=rec.get("decided_at"),
    )
    return candidate, utterance


__all__ = [
    "KeywordSet",
    "CsCandidate",
    "max_consecutive_run",
    "is_code_switched",
    "keyword_candidates",
    "token_count_candidate",
    "scan_corpus",
    "decide",
    "candidate_to_record",
    "candidate_from_record",
    "MIN_RUN_ES",
    "MIN_WORDS_EACH",
]
