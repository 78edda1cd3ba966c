"""Synthetic code-switched sentence generation.

Catalan sentences are length-filtered, noun chunks are located with a
shallow DET? ADJ* NOUN+ ADJ* pattern over a POS lexicon, one or two chunks
are translated into Spanish, and the result is emitted as alternating
<cat>/<esp> segments. Every token of the source sentence lands in exactly
one segment; non-chunk tokens are preserved verbatim and in order.

The POS lexicon is a two-column TSV (word, tag in {DET, ADJ, NOUN,
OTHER}); unknown words tag OTHER, which simply keeps them out of chunks.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

from .augment import derive_seed
from .corpus import Utterance
from .errors import ConfigError, CsForgeError
from .langid import TaggedToken, tokenize

POS_TAGS = ("DET", "ADJ", "NOUN", "OTHER")
SEGMENT_LANGS = ("cat", "esp")

DEFAULT_MIN_TOKENS = 4
DEFAULT_MAX_TOKENS = 25


class TagParseError(CsForgeError):
    """Malformed <cat>/<esp> markup, with the offending position."""


@dataclass(frozen=True)
class PosLexicon:
    """Word to part-of-speech map for the shallow chunker."""

    tags: dict[str, str]

    def __post_init__(self) -> None:
        for word, tag in self.tags.items():
            if tag not in POS_TAGS:
                raise ConfigError(f"word {word!r}: POS tag {tag!r} not in {POS_TAGS}")

    @classmethod
    def load(cls, path: str | Path) -> "PosLexicon":
        tags: dict[str, str] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    word, tag = line.split("\t")
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: expected 'word<TAB>tag'") from exc
                tags[word.lower()] = tag
        return cls(tags=tags)

    def tag(self, word: str) -> str:
        return self.tags.get(word.lower(), "OTHER")


@dataclass(frozen=True)
class ChunkSpan:
    """A noun-chunk span over the token sequence, end exclusive."""

    start_tok: int
    end_tok: int
    text: str

    def __post_init__(self) -> None:
        if not 0 <= self.start_tok < self.end_tok:
            raise ValueError(f"invalid chunk span [{self.start_tok}, {self.end_tok})")


@dataclass(frozen=True)
class TaggedCsSentence:
    """Alternating cat/esp segments plus provenance of the replacements."""

    segments: tuple[tuple[str, str], ...]
    source_id: str
    replaced_chunks: tuple[tuple[ChunkSpan, str], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple((l, t) for l, t in self.segments))
        object.__setattr__(self, "replaced_chunks", tuple(self.replaced_chunks))
        if not self.segments:
            raise ValueError("a tagged sentence needs at least one segment")
        for lang, text in self.segments:
            if lang not in SEGMENT_LANGS:
                raise ValueError(f"segment lang {lang!r} not in {SEGMENT_LANGS}")
            if not text:
                raise ValueError("segment text must be nonempty")
        for (a, _), (b, _) in zip(self.segments, self.segments[1:]):
            if a == b:
                raise ValueError("adjacent segments must alternate language")

    @property
    def sentence(self) -> str:
        """The plain sentence: segment texts joined by single spaces."""
        return " ".join(text for _, text in self.segments)


T = TypeVar("T", str, Utterance)


def filter_by_length(
    sentences: Iterable[T],
    min_tokens: int = DEFAULT_MIN_TOKENS,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[T]:
    """Keep sentences whose token count lies in [min_tokens, max_tokens]."""
    if min_tokens > max_tokens:
        raise ConfigError(f"min_tokens {min_tokens} exceeds max_tokens {max_tokens}")
    kept = []
    for item in sentences:
        text = item.text if isinstance(item, Utterance) else item
        if min_tokens <= len(tokenize(text)) <= max_tokens:
            kept.append(item)
    return kept


def extract_noun_chunks(tokens: Sequence[TaggedToken], pos: PosLexicon) -> list[ChunkSpan]:
    """Maximal left-to-right matches of DET? ADJ* NOUN+ ADJ*, non-overlapping."""
    tags = [pos.tag(t.text) for t in tokens]
    chunks: list[ChunkSpan] = []
    i = 0
    n = len(tokens)
    while i < n:
        j = i
        if j < n and tags[j] == "DET":
            j += 1
        while j < n and tags[j] == "ADJ":
            j += 1
        if j < n and tags[j] == "NOUN":
            while j < n and tags[j] == "NOUN":
                j += 1
            while j < n and tags[j] == "ADJ":
                j += 1
            chunks.append(
                ChunkSpan(
                    start_tok=i,
                    end_tok=j,
                    text=" ".join(t.text for t in tokens[i:j]),
                )
            )
            i = j
        else:
            i += 1
    return chunks


def generate_cs_sentence(
    utterance: Utterance,
    pos: PosLexicon,
    translator: Callable[[str], str],
    rng_seed: int = 0,
) -> TaggedCsSentence | None:
    """Swap one or two noun chunks of a Catalan sentence into Spanish.

    Chunk choice is uniform without replacement, seeded by (rng_seed,
    utterance id) so a corpus run is reproducible in any processing order.
    Returns None when the sentence has no chunk to replace.
    """
    if utterance.lang != "ca":
        raise ConfigError(f"utterance {utterance.id!r}: synthetic CS starts from lang 'ca'")
    tokens = tokenize(utterance.text)
    chunks = extract_noun_chunks(tokens, pos)
    if not chunks:
        return None
    rng = random.Random(derive_seed(rng_seed, utterance.id))
    k = min(2, len(chunks))
    selected = sorted(rng.sample(range(len(chunks)), k))
    replaced: list[tuple[ChunkSpan, str]] = []
    for index in selected:
        chunk = chunks[index]
        try:
            replaced.append((chunk, translator(chunk.text)))
        except Exception as exc:
            raise CsForgeError(
                f"translation failed for chunk {chunk.text!r} "
                f"(utterance {utterance.id!r}): {exc}"
            ) from exc

    segments: list[tuple[str, str]] = []
    cursor = 0
    for chunk, translated in replaced:
        if chunk.start_tok > cursor:
            segments.append(("cat", " ".join(t.text for t in tokens[cursor : chunk.start_tok])))
        segments.append(("esp", translated))
        cursor = chunk.end_tok
    if cursor < len(tokens):
        segments.append(("cat", " ".join(t.text for t in tokens[cursor:])))
    return TaggedCsSentence(
        segments=tuple(_coalesce(segments)),
        source_id=utterance.id,
        replaced_chunks=tuple(replaced),
    )


def _coalesce(segments: list[tuple[str, str]]) -> list[tuple[str, str]]:
    out: list[tuple[str, str]] = []
    for lang, text in segments:
        if out and out[-1][0] == lang:
            out[-1] = (lang, f"{out[-1][1]} {text}")
        else:
            out.append((lang, text))
    return out


def render_tagged(sentence: TaggedCsSentence) -> str:
    """Serialise to paired tags: <cat>...</cat><esp>...</esp>..."""
    return "".join(f"<{lang}>{text}</{lang}>" for lang, text in sentence.segments)


_OPEN_TAG_RE = re.compile(r"<(cat|esp)>")


def route_segments(tagged: str) -> list[tuple[str, str]]:
    """Parse a tagged sentence back into its ordered (lang, text) segments.

    The whole string must be a sequence of properly closed <cat>/<esp>
    blocks; anything else fails with the position of the problem.
    """
    if not tagged:
        raise TagParseError("position 0: no segments")
    segments: list[tuple[str, str]] = []
    pos = 0
    n = len(tagged)
    while pos < n:
        m = _OPEN_TAG_RE.match(tagged, pos)
        if not m:
            raise TagParseError(f"position {pos}: expected <cat> or <esp>")
        lang = m.group(1)
        body_start = m.end()
        closing = f"</{lang}>"
        next_tag = tagged.find("<", body_start)
        if next_tag == -1 or not tagged.startswith(closing, next_tag):
            where = body_start if next_tag == -1 else next_tag
            raise TagParseError(f"position {where}: unclosed <{lang}>")
        if next_tag == body_start:
            raise TagParseError(f"position {body_start}: empty <{lang}> segment")
        segments.append((lang, tagged[body_start:next_tag]))
        pos = next_tag + len(closing)
    return segments


__all__ = [
    "PosLexicon",
    "ChunkSpan",
    "TaggedCsSentence",
    "TagParseError",
    "filter_by_length",
    "extract_noun_chunks",
    "generate_cs_sentence",
    "render_tagged",
    "route_segments",
    "POS_TAGS",
]
