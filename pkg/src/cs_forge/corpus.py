"""Corpus domain types, manifest I/O, and deterministic splitting.

A manifest is a UTF-8 line-delimited file with one JSON object per line:

    {"id": str, "audio_path": str?, "text": str,
     "lang": "ca"|"es"|"mixed"|"unknown",
     "speaker_id": str?, "gender": "male"|"female"|"unspecified",
     "duration_s": number?}

Field order is irrelevant. Unknown keys are kept on the record and written
back verbatim, so manifests survive round-trips through tools that do not
know about every field.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import ConfigError, ManifestError

LANGS = ("ca", "es", "mixed", "unknown")
GENDERS = ("male", "female", "unspecified")

_KNOWN_KEYS = ("id", "audio_path", "text", "lang", "speaker_id", "gender", "duration_s")


@dataclass(frozen=True)
class Utterance:
    """One transcribed audio segment with its metadata."""

    id: str
    text: str
    lang: str = "unknown"
    audio_path: str | None = None
    speaker_id: str | None = None
    gender: str = "unspecified"
    duration_s: float | None = None
    extra: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if not self.id:
            raise ManifestError("utterance id must be nonempty")
        if self.lang not in LANGS:
            raise ManifestError(f"utterance {self.id!r}: lang {self.lang!r} not in {LANGS}")
        if self.gender not in GENDERS:
            raise ManifestError(f"utterance {self.id!r}: gender {self.gender!r} not in {GENDERS}")
        if self.duration_s is not None and self.duration_s < 0:
            raise ManifestError(f"utterance {self.id!r}: negative duration_s")

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {"id": self.id, "text": self.text, "lang": self.lang}
        if self.audio_path is not None:
            rec["audio_path"] = self.audio_path
        if self.speaker_id is not None:
            rec["speaker_id"] = self.speaker_id
        rec["gender"] = self.gender
        if self.duration_s is not None:
            rec["duration_s"] = self.duration_s
        rec.update(self.extra)
        return rec

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "Utterance":
        if "id" not in rec:
            raise ManifestError("record missing required key 'id'")
        if "text" not in rec:
            raise ManifestError(f"record {rec.get('id')!r} missing required key 'text'")
        extra = {k: v for k, v in rec.items() if k not in _KNOWN_KEYS}
        duration = rec.get("duration_s")
        return cls(
            id=str(rec["id"]),
            text=str(rec["text"]),
            lang=rec.get("lang", "unknown"),
            audio_path=rec.get("audio_path"),
            speaker_id=rec.get("speaker_id"),
            gender=rec.get("gender", "unspecified"),
            duration_s=float(duration) if duration is not None else None,
            extra=extra,
        )


@dataclass(frozen=True)
class Manifest:
    """An ordered collection of utterances from one source."""

    entries: tuple[Utterance, ...]
    source_name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        seen: set[str] = set()
        for u in self.entries:
            if u.id in seen:
                raise ManifestError(f"duplicate utterance id {u.id!r}")
            seen.add(u.id)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Utterance]:
        return iter(self.entries)

    @property
    def total_duration(self) -> float:
        """Sum of the present duration_s values, in seconds."""
        return sum(u.duration_s for u in self.entries if u.duration_s is not None)

    def by_id(self) -> dict[str, Utterance]:
        return {u.id: u for u in self.entries}


@dataclass(frozen=True)
class SplitSpec:
    """Train fraction and shuffle seed for a deterministic two-way split."""

    train_fraction: float
    seed: int

    def __post_init__(self) -> None:
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.seed < 0:
            raise ConfigError("seed must be a nonnegative integer")


@dataclass(frozen=True)
class ManifestStats:
    count: int
    total_hours: float
    gender_counts: dict[str, int]
    lang_counts: dict[str, int]


def load_manifest(path: str | Path, source_name: str | None = None) -> Manifest:
    """Read a line-delimited manifest, preserving entry order.

    Raises ManifestError with a line number for malformed lines, and names
    the later line when an id is duplicated.
    """
    path = Path(path)
    entries: list[Utterance] = []
    seen: dict[str, int] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: malformed line: {exc}") from exc
            if not isinstance(rec, dict):
                raise ManifestError(f"{path}:{lineno}: expected a JSON object")
            try:
                utt = Utterance.from_record(rec)
            except ManifestError as exc:
                raise ManifestError(f"{path}:{lineno}: {exc}") from exc
            if utt.id in seen:
                raise ManifestError(
                    f"{path}:{lineno}: duplicate id {utt.id!r} (first seen on line {seen[utt.id]})"
                )
            seen[utt.id] = lineno
            entries.append(utt)
    return Manifest(entries=tuple(entries), source_name=source_name or path.stem)


def save_manifest(manifest: Manifest, path: str | Path) -> None:
    """Write one JSON object per line; unknown keys ride along unchanged."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for u in manifest.entries:
            fh.write(json.dumps(u.to_record(), ensure_ascii=False))
            fh.write("\n")


def split_manifest(manifest: Manifest, spec: SplitSpec) -> tuple[Manifest, Manifest]:
    """Deterministic shuffle under the seed, then split at floor(n * fraction).

    The two partitions are disjoint and together contain every entry of the
    input exactly once. The cut is computed in exact rational arithmetic so
    e.g. 70% of 10 entries is 7, not int(6.999...).
    """
    if len(manifest) == 0:
        raise ManifestError("cannot split an empty manifest")
    entries = list(manifest.entries)
    random.Random(spec.seed).shuffle(entries)
    cut = int(len(entries) * Fraction(str(spec.train_fraction)))
    train = Manifest(entries=tuple(entries[:cut]), source_name=manifest.source_name)
    rest = Manifest(entries=tuple(entries[cut:]), source_name=manifest.source_name)
    return train, rest


def manifest_stats(manifest: Manifest) -> ManifestStats:
    """Entry count, total hours, and gender/language tallies."""
    gender_counts = {g: 0 for g in GENDERS}
    lang_counts = {lang: 0 for lang in LANGS}
    for u in manifest:
        gender_counts[u.gender] += 1
        lang_counts[u.lang] += 1
    return ManifestStats(
        count=len(manifest),
        total_hours=manifest.total_duration / 3600.0,
        gender_counts=gender_counts,
        lang_counts=lang_counts,
    )


def write_records(records: Iterable[dict[str, Any]], path: str | Path) -> None:
    """Write arbitrary JSON records in manifest line format."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False))
            fh.write("\n")


def read_records(path: str | Path) -> list[dict[str, Any]]:
    """Read line-delimited JSON records, with line numbers on parse errors."""
    path = Path(path)
    out: list[dict[str, Any]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}:{lineno}: malformed line: {exc}") from exc
            out.append(rec)
    return out


__all__ = [
    "Utterance",
    "Manifest",
    "SplitSpec",
    "ManifestStats",
    "load_manifest",
    "save_manifest",
    "split_manifest",
    "manifest_stats",
    "write_records",
    "read_records",
]
