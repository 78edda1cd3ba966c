"""Corpus construction and evaluation for Catalan–Spanish code-switched ASR.

The package covers the full pipeline: manifest handling and splitting,
token-level language identification, code-switching detection with a
manual-review service, synthetic code-switched text generation,
monolingual-tuple concatenation, the audio augmentation chain,
decoding-prompt construction, and WER scoring with experiment-matrix
reports.
"""

from __future__ import annotations

from .audio import AudioBuffer, CANONICAL_RATE, read_wav, resample_linear, write_wav
from .augment import AugmentationConfig, apply_chain, augment_utterance
from .clients import PromptConfig, build_prompt, render_prompt, translate
from .concat import TuplePair, TuplePlan, materialize_tuple, plan_tuples
from .corpus import (
    Manifest,
    SplitSpec,
    Utterance,
    load_manifest,
    manifest_stats,
    save_manifest,
    split_manifest,
)
from .detect import CsCandidate, KeywordSet, decide, is_code_switched, scan_corpus
from .errors import (
    AlreadyDecidedError,
    AudioError,
    ConfigError,
    CsForgeError,
    ManifestError,
    RuleViolationError,
    TransportError,
)
from .evaluate import (
    EvalRecord,
    best_configuration,
    evaluate_set,
    load_published_results,
    normalize_transcript,
    results_table,
    wer,
)
from .langid import LangCounts, LangLexicon, TaggedToken, tag_utterance, tokenize
from .review import ReviewStore, create_app, export_accepted
from .textgen import (
    PosLexicon,
    TaggedCsSentence,
    generate_cs_sentence,
    render_tagged,
    route_segments,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "AugmentationConfig",
    "AlreadyDecidedError",
    "AudioError",
    "CANONICAL_RATE",
    "ConfigError",
    "CsCandidate",
    "CsForgeError",
    "EvalRecord",
    "KeywordSet",
    "LangCounts",
    "LangLexicon",
    "Manifest",
    "ManifestError",
    "PosLexicon",
    "PromptConfig",
    "ReviewStore",
    "RuleViolationError",
    "SplitSpec",
    "TaggedCsSentence",
    "TaggedToken",
    "TransportError",
    "TuplePair",
    "TuplePlan",
    "Utterance",
    "apply_chain",
    "augment_utterance",
    "best_configuration",
    "build_prompt",
    "create_app",
    "decide",
    "evaluate_set",
    "export_accepted",
    "generate_cs_sentence",
    "is_code_switched",
    "load_manifest",
    "load_published_results",
    "manifest_stats",
    "materialize_tuple",
    "normalize_transcript",
    "plan_tuples",
    "read_wav",
    "render_prompt",
    "render_tagged",
    "resample_linear",
    "results_table",
    "route_segments",
    "save_manifest",
    "scan_corpus",
    "split_manifest",
    "tag_utterance",
    "tokenize",
    "translate",
    "wer",
    "write_wav",
    "__version__",
]
