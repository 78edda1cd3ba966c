"""Token-level Catalan/Spanish classification.

The classifier is intentionally simple and fully deterministic: exclusive
word lists decide a token outright, and anything ambiguous or unseen falls
back to a character n-gram log-odds score (positive means Catalan). It
exists to label tokens behind a stable interface; nothing downstream cares
how the label was produced.

Lexicon directory layout (all UTF-8):

    ca.txt      one lowercase Catalan word form per line
    es.txt      one lowercase Spanish word form per line
    ngrams.tsv  two columns: character n-gram (n = 2 or 3), log-odds weight
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError

TOKEN_LANGS = ("ca", "es", "unk")

# Letters (any script) optionally joined by an apostrophe or the ela
# geminada middle dot; both must sit between letters. Digits, punctuation
# and free-standing apostrophes never start or extend a token.
_TOKEN_RE = re.compile(r"[^\W\d_]+(?:['’·][^\W\d_]+)*")

DEFAULT_THETA = 0.5


@dataclass(frozen=True)
class TaggedToken:
    """A word, its character span in the raw transcript, and its label."""

    text: str
    start: int
    end: int
    lang: str = "unk"

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"token span ({self.start}, {self.end}) must be nonempty")
        if self.lang not in TOKEN_LANGS:
            raise ValueError(f"token lang {self.lang!r} not in {TOKEN_LANGS}")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class LangCounts:
    """Per-label token tallies for one utterance."""

    ca: int = 0
    es: int = 0
    unk: int = 0

    def __post_init__(self) -> None:
        if min(self.ca, self.es, self.unk) < 0:
            raise ValueError("language counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.ca + self.es + self.unk

    def to_record(self) -> dict[str, int]:
        return {"ca": self.ca, "es": self.es, "unk": self.unk}


@dataclass(frozen=True)
class LangLexicon:
    """Exclusive word sets plus n-gram weights for the ambiguous rest.

    Words appearing in both input lists are moved to ``shared_words`` at
    construction, so ``ca_words`` and ``es_words`` are always disjoint.
    """

    ca_words: frozenset[str]
    es_words: frozenset[str]
    shared_words: frozenset[str] = frozenset()
    ngram_weights: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        overlap = self.ca_words & self.es_words
        if overlap:
            object.__setattr__(self, "shared_words", frozenset(self.shared_words | overlap))
            object.__setattr__(self, "ca_words", frozenset(self.ca_words - overlap))
            object.__setattr__(self, "es_words", frozenset(self.es_words - overlap))
        object.__setattr__(self, "ca_words", frozenset(self.ca_words - self.shared_words))
        object.__setattr__(self, "es_words", frozenset(self.es_words - self.shared_words))
        for ngram, weight in self.ngram_weights.items():
            if not math.isfinite(weight):
                raise ConfigError(f"n-gram {ngram!r} has non-finite weight {weight}")

    @classmethod
    def load(cls, lexicon_dir: str | Path) -> "LangLexicon":
        lexicon_dir = Path(lexicon_dir)
        ca = _read_wordlist(lexicon_dir / "ca.txt")
        es = _read_wordlist(lexicon_dir / "es.txt")
        weights: dict[str, float] = {}
        ngram_path = lexicon_dir / "ngrams.tsv"
        if ngram_path.exists():
            with ngram_path.open("r", encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, start=1):
                    line = line.rstrip("\n")
                    if not line:
                        continue
                    try:
                        ngram, weight = line.split("\t")
                        weights[ngram] = float(weight)
                    except ValueError as exc:
                        raise ConfigError(f"{ngram_path}:{lineno}: expected 'ngram<TAB>weight'") from exc
        return cls(ca_words=frozenset(ca), es_words=frozenset(es), ngram_weights=weights)


def _read_wordlist(path: Path) -> set[str]:
    words: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line in fh:
            word = line.strip().lower()
            if word:
                words.add(word)
    return words


def tokenize(text: str) -> list[TaggedToken]:
    """Split a transcript into word tokens, labels initialised to unk.

    Spans index the original string, so ``text[tok.start:tok.end]`` always
    reproduces the surface form.
    """
    return [
        TaggedToken(text=m.group(0), start=m.start(), end=m.end())
        for m in _TOKEN_RE.finditer(text)
    ]


def ngram_score(word: str, lexicon: LangLexicon) -> float:
    """Sum of the lexicon's weights over the word's character 2- and 3-grams."""
    word = word.lower()
    score = 0.0
    weights = lexicon.ngram_weights
    for n in (2, 3):
        for i in range(len(word) - n + 1):
            score += weights.get(word[i : i + n], 0.0)
    return score


def classify_token(token: TaggedToken, lexicon: LangLexicon, theta: float = DEFAULT_THETA) -> str:
    """Label one token: exclusive lists first, n-gram log-odds otherwise.

    A score above ``+theta`` reads Catalan, below ``-theta`` Spanish, and
    anything in between stays unk. Ties never fabricate a confident label.
    """
    word = token.text.lower()
    if word not in lexicon.shared_words:
        if word in lexicon.ca_words:
            return "ca"
        if word in lexicon.es_words:
            return "es"
    score = ngram_score(word, lexicon)
    if score > theta:
        return "ca"
    if score < -theta:
        return "es"
    return "unk"


def tag_utterance(
    text: str, lexicon: LangLexicon, theta: float = DEFAULT_THETA
) -> tuple[list[TaggedToken], LangCounts]:
    """Tokenize and label a transcript, tallying the three labels."""
    tokens = [
        TaggedToken(text=t.text, start=t.start, end=t.end, lang=classify_token(t, lexicon, theta))
        for t in tokenize(text)
    ]
    counts = LangCounts(
        ca=sum(1 for t in tokens if t.lang == "ca"),
        es=sum(1 for t in tokens if t.lang == "es"),
        unk=sum(1 for t in tokens if t.lang == "unk"),
    )
    return tokens, counts


__all__ = [
    "TaggedToken",
    "LangCounts",
    "LangLexicon",
    "tokenize",
    "ngram_score",
    "classify_token",
    "tag_utterance",
    "DEFAULT_THETA",
]
