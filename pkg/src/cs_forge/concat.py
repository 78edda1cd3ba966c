"""Gender-balanced Catalan-Spanish audio tuples with merged transcripts.

A tuple joins one Catalan and one Spanish clip in a fixed order (ca_es or
es_ca). Planning pairs every clip exactly once, splits the orders evenly
(the ca_es group takes the odd one out), and, when gender balancing is on,
spreads each gender bucket of each language as evenly as possible across
the two orders.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .audio import CANONICAL_RATE, AudioBuffer, concatenate, read_wav, resample_linear, silence, write_wav
from .corpus import Manifest, Utterance
from .errors import AudioError, ConfigError, ManifestError

log = logging.getLogger(__name__)

ORDERS = ("ca_es", "es_ca")
_GENDER_BUCKETS = ("male", "female", "unspecified")


class PlannedTuple(NamedTuple):
    order: str
    ca_id: str
    es_id: str


@dataclass(frozen=True)
class TuplePlan:
    ca_pool: Manifest
    es_pool: Manifest
    gap_s: float = 0.0
    seed: int = 0
    balance_gender: bool = True

    def __post_init__(self) -> None:
        if len(self.ca_pool) == 0 or len(self.es_pool) == 0:
            raise ManifestError("tuple pools must be nonempty")
        if self.gap_s < 0:
            raise ConfigError("gap_s must be nonnegative")


@dataclass(frozen=True)
class TuplePair:
    """A materialised tuple: two source utterances plus the merged outputs."""

    order: str
    first: Utterance
    second: Utterance
    merged_text: str
    merged_audio_path: str
    duration_s: float

    def __post_init__(self) -> None:
        if self.order not in ORDERS:
            raise ConfigError(f"unknown tuple order {self.order!r}")
        if self.first.lang == self.second.lang:
            raise ManifestError("tuple halves must differ in language")
        expected_first = "ca" if self.order == "ca_es" else "es"
        if self.first.lang != expected_first:
            raise ManifestError(
                f"order {self.order} expects a {expected_first} clip first, got {self.first.lang}"
            )

    @property
    def id(self) -> str:
        return f"{self.first.id}__{self.second.id}"

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "text": self.merged_text,
            "lang": "mixed",
            "audio_path": self.merged_audio_path,
            "duration_s": self.duration_s,
            "order": self.order,
            "first_id": self.first.id,
            "second_id": self.second.id,
        }


def _split_buckets(clips: list[Utterance], first_size: int) -> tuple[list[Utterance], list[Utterance]]:
    """Partition clips into (first, second) with each gender bucket split evenly.

    Odd buckets alternate which side takes the extra clip, arranged so the
    side totals come out to exactly (first_size, n - first_size).
    """
    buckets = {g: [u for u in clips if u.gender == g] for g in _GENDER_BUCKETS}
    odd = [g for g in _GENDER_BUCKETS if len(buckets[g]) % 2 == 1]
    extras_to_first = (len(odd) + 1) // 2
    first: list[Utterance] = []
    second: list[Utterance] = []
    odd_seen = 0
    for gender in _GENDER_BUCKETS:
        bucket = buckets[gender]
        half = len(bucket) // 2
        take_first = half
        if len(bucket) % 2 == 1:
            odd_seen += 1
            if odd_seen <= extras_to_first:
                take_first += 1
        first.extend(bucket[:take_first])
        second.extend(bucket[take_first:])
    assert len(first) == first_size, "bucket arithmetic must hit the group size"
    return first, second


def plan_tuples(plan: TuplePlan) -> list[PlannedTuple]:
    """Pair clips one-to-one and assign orders.

    With n pairs, ceil(n/2) become ca_es and floor(n/2) es_ca. Unequal
    pools are truncated to the smaller size after the seeded shuffle, with
    a warning. The same seed always yields the same plan.
    """
    rng = random.Random(plan.seed)
    ca = list(plan.ca_pool.entries)
    es = list(plan.es_pool.entries)
    rng.shuffle(ca)
    rng.shuffle(es)
    if len(ca) != len(es):
        n = min(len(ca), len(es))
        log.warning(
            "pool sizes differ (ca=%d, es=%d); truncating to %d pairs", len(ca), len(es), n
        )
        ca = ca[:n]
        es = es[:n]
    n = len(ca)
    n_ca_es = (n + 1) // 2
    if plan.balance_gender:
        ca_first, ca_second = _split_buckets(ca, n_ca_es)
        es_first, es_second = _split_buckets(es, n_ca_es)
        # Regrouping by gender bunches the buckets together; reshuffle so
        # pairing does not systematically align genders across languages.
        rng.shuffle(ca_first)
        rng.shuffle(ca_second)
        rng.shuffle(es_first)
        rng.shuffle(es_second)
    else:
        ca_first, ca_second = ca[:n_ca_es], ca[n_ca_es:]
        es_first, es_second = es[:n_ca_es], es[n_ca_es:]
    out = [PlannedTuple("ca_es", c.id, e.id) for c, e in zip(ca_first, es_first)]
    out.extend(PlannedTuple("es_ca", c.id, e.id) for c, e in zip(ca_second, es_second))
    return out


def materialize_tuple(
    entry: PlannedTuple,
    ca_by_id: dict[str, Utterance],
    es_by_id: dict[str, Utterance],
    *,
    audio_root: str | Path,
    out_path: str | Path,
    gap_s: float = 0.0,
    sample_rate: int = CANONICAL_RATE,
) -> TuplePair:
    """Concatenate the planned pair's audio and transcripts.

    Output audio is first clip + gap_s of silence + second clip, all at
    the target rate; the merged transcript joins the texts with one space
    in audio order.
    """
    ca_utt = ca_by_id[entry.ca_id]
    es_utt = es_by_id[entry.es_id]
    first, second = (ca_utt, es_utt) if entry.order == "ca_es" else (es_utt, ca_utt)
    parts: list[AudioBuffer] = []
    for utt in (first, second):
        if utt.audio_path is None:
            raise AudioError(f"utterance {utt.id!r} has no audio_path")
        buf = read_wav(Path(audio_root) / utt.audio_path)
        parts.append(resample_linear(buf, sample_rate))
    if gap_s > 0:
        parts.insert(1, silence(gap_s, sample_rate))
    merged = concatenate(parts)
    write_wav(merged, out_path)
    return TuplePair(
        order=entry.order,
        first=first,
        second=second,
        merged_text=f"{first.text} {second.text}",
        merged_audio_path=str(out_path),
        duration_s=merged.duration_s,
    )


def total_duration(tuples: Iterable[TuplePair]) -> float:
    """Sum of tuple durations, in hours."""
    return sum(t.duration_s for t in tuples) / 3600.0


__all__ = [
    "PlannedTuple",
    "TuplePlan",
    "TuplePair",
    "plan_tuples",
    "materialize_tuple",
    "total_duration",
    "ORDERS",
]
