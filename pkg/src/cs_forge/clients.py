"""Clients for the external translation, TTS, and ASR services.

All three speak the same small JSON-over-HTTP convention (see
docs/wire.md): a POST per request, a content-derived request_id for
idempotent retries, and responses matched to requests by id rather than
arrival order. Transient failures (connection errors, 5xx) are retried
with exponential backoff; other non-success statuses raise immediately
with the body preserved.

Decoding prompts are built here too: an ordered sequence of byte-exact
control tokens with zero, one, or two language tags.
"""

from __future__ import annotations

import base64
import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from .audio import AudioBuffer, read_wav_bytes
from .corpus import Manifest, Utterance
from .errors import AudioError, ConfigError, TransportError
from .textgen import SEGMENT_LANGS

PREV_TOKEN = "<|startofprev|>"
SOT_TOKEN = "<|startoftranscript|>"
TRANSCRIBE_TOKEN = "<|transcribe|>"
NO_TIMESTAMPS_TOKEN = "<|notimestamps|>"

PROMPT_LANGS = ("ca", "es")

DEFAULT_ATTEMPTS = 3
DEFAULT_BACKOFF_S = 0.5
DEFAULT_TIMEOUT_S = 30.0
DEFAULT_MAX_IN_FLIGHT = 4


@dataclass(frozen=True)
class PromptConfig:
    """Decoding-prompt shape: which language tags, in which order."""

    lang_tokens: tuple[str, ...] = ()
    task: str = "transcribe"
    timestamps: bool = False
    previous_text: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lang_tokens", tuple(self.lang_tokens))
        if len(self.lang_tokens) > 2:
            raise ConfigError(f"at most two language tokens, got {len(self.lang_tokens)}")
        if len(set(self.lang_tokens)) != len(self.lang_tokens):
            raise ConfigError(f"duplicate language tokens in {self.lang_tokens}")
        for lang in self.lang_tokens:
            if lang not in PROMPT_LANGS:
                raise ConfigError(f"language token {lang!r} not in {PROMPT_LANGS}")
        if self.task != "transcribe":
            raise ConfigError(f"unsupported task {self.task!r}")
        if self.previous_text == "":
            raise ConfigError("previous_text must be None or nonempty")


@dataclass(frozen=True)
class AsrRequest:
    audio_path: Path
    prompt: PromptConfig
    model_id: str = "default"

    def __post_init__(self) -> None:
        object.__setattr__(self, "audio_path", Path(self.audio_path))
        if not self.model_id:
            raise ConfigError("model_id must be nonempty")


@dataclass(frozen=True)
class TtsRequest:
    segments: tuple[tuple[str, str], ...]
    voice_id: str = "default"

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple((l, t) for l, t in self.segments))
        if not self.segments:
            raise ConfigError("a TTS request needs at least one segment")
        for lang, text in self.segments:
            if lang not in SEGMENT_LANGS:
                raise ConfigError(f"segment lang {lang!r} not in {SEGMENT_LANGS}")
            if not text:
                raise ConfigError("segment text must be nonempty")
        if not self.voice_id:
            raise ConfigError("voice_id must be nonempty")


def build_prompt(config: PromptConfig) -> tuple[str, ...]:
    """The ordered token-string sequence for a decoding configuration."""
    tokens: list[str] = []
    if config.previous_text is not None:
        tokens.append(PREV_TOKEN)
        tokens.append(config.previous_text)
    tokens.append(SOT_TOKEN)
    for lang in config.lang_tokens:
        tokens.append(f"<|{lang}|>")
    tokens.append(TRANSCRIBE_TOKEN)
    if not config.timestamps:
        tokens.append(NO_TIMESTAMPS_TOKEN)
    return tuple(tokens)


def render_prompt(config: PromptConfig) -> str:
    return "".join(build_prompt(config))


def _request_id(body: dict) -> str:
    canonical = json.dumps(body, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()[:16]


def _post(
    url: str,
    body: dict,
    *,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff_s: float = DEFAULT_BACKOFF_S,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> requests.Response:
    """POST with retries on connection errors and 5xx; anything else returns."""
    if attempts < 1:
        raise ConfigError(f"attempts must be >= 1, got {attempts}")
    body = dict(body)
    body["request_id"] = _request_id(body)
    last_error = ""
    for attempt in range(attempts):
        if attempt:
            time.sleep(backoff_s * 2 ** (attempt - 1))
        try:
            response = requests.post(url, json=body, timeout=timeout_s)
        except requests.RequestException as exc:
            last_error = str(exc)
            continue
        if response.status_code >= 500:
            last_error = f"status {response.status_code}"
            continue
        if not response.ok:
            raise TransportError(
                f"{url}: request rejected with status {response.status_code}",
                status=response.status_code,
                body=response.text,
            )
        return response
    raise TransportError(f"{url}: giving up after {attempts} attempts ({last_error})")


def _json_field(response: requests.Response, field: str, url: str) -> str:
    try:
        value = response.json()[field]
    except (ValueError, KeyError) as exc:
        raise TransportError(
            f"{url}: malformed response, expected JSON with {field!r}",
            status=response.status_code,
            body=response.text[:200],
        ) from exc
    if not isinstance(value, str):
        raise TransportError(f"{url}: field {field!r} is not a string")
    return value


def transcribe(
    request: AsrRequest,
    endpoint: str,
    *,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff_s: float = DEFAULT_BACKOFF_S,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> str:
    """Send one utterance to the ASR service and return its hypothesis."""
    if not request.audio_path.is_file():
        raise AudioError(f"audio not readable: {request.audio_path}")
    url = f"{endpoint.rstrip('/')}/asr"
    body = {
        "audio_b64": base64.b64encode(request.audio_path.read_bytes()).decode("ascii"),
        "model_id": request.model_id,
        "prompt_tokens": list(build_prompt(request.prompt)),
    }
    response = _post(url, body, attempts=attempts, backoff_s=backoff_s, timeout_s=timeout_s)
    return _json_field(response, "text", url)


def synthesize(
    request: TtsRequest,
    endpoint: str,
    *,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff_s: float = DEFAULT_BACKOFF_S,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> AudioBuffer:
    """Send language-routed segments to the TTS service; decode its WAV reply."""
    url = f"{endpoint.rstrip('/')}/tts"
    body = {
        "segments": [[lang, text] for lang, text in request.segments],
        "voice_id": request.voice_id,
    }
    response = _post(url, body, attempts=attempts, backoff_s=backoff_s, timeout_s=timeout_s)
    return read_wav_bytes(response.content)


def translate(
    text: str,
    *,
    src: str = "ca",
    dst: str = "es",
    endpoint: str | None = None,
    dictionary: dict[str, str] | None = None,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff_s: float = DEFAULT_BACKOFF_S,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> str:
    """Translate via the MT service, or word-by-word through a dictionary.

    The dictionary fallback looks up the whole phrase first, then each
    whitespace word (case-insensitively); unknown words pass through
    unchanged.
    """
    if not text:
        raise ConfigError("cannot translate empty text")
    if endpoint is not None:
        url = f"{endpoint.rstrip('/')}/translate"
        body = {"text": text, "src": src, "dst": dst}
        response = _post(url, body, attempts=attempts, backoff_s=backoff_s, timeout_s=timeout_s)
        return _json_field(response, "translation", url)
    if dictionary is not None:
        return _dictionary_translate(text, dictionary)
    raise ConfigError("translate needs an endpoint or a dictionary")


def _dictionary_translate(text: str, entries: dict[str, str]) -> str:
    whole = entries.get(text, entries.get(text.lower()))
    if whole is not None:
        return whole
    words = text.split()
    return " ".join(entries.get(w, entries.get(w.lower(), w)) for w in words)


@dataclass(frozen=True)
class DictTranslator:
    """Offline ca→es translator over a fixed word/phrase table."""

    entries: dict[str, str]

    def __post_init__(self) -> None:
        for source, target in self.entries.items():
            if not source or not target:
                raise ConfigError("dictionary entries must be nonempty on both sides")

    @classmethod
    def load(cls, path: str | Path) -> "DictTranslator":
        entries: dict[str, str] = {}
        with Path(path).open("r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    source, target = line.split("\t")
                except ValueError as exc:
                    raise ConfigError(f"{path}:{lineno}: expected 'source<TAB>target'") from exc
                entries[source] = target
        return cls(entries=entries)

    def __call__(self, text: str) -> str:
        if not text:
            raise ConfigError("cannot translate empty text")
        return _dictionary_translate(text, self.entries)


def transcribe_corpus(
    manifest: Manifest,
    endpoint: str,
    prompt: PromptConfig,
    *,
    audio_root: Path | None = None,
    model_id: str = "default",
    max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    attempts: int = DEFAULT_ATTEMPTS,
    backoff_s: float = DEFAULT_BACKOFF_S,
    timeout_s: float = DEFAULT_TIMEOUT_S,
) -> list[dict]:
    """Transcribe every utterance, a bounded number in flight at a time.

    Returns one record per utterance, in manifest order regardless of
    completion order: {"id", "hyp", "prompt_tokens"}.
    """
    if max_in_flight < 1:
        raise ConfigError(f"max_in_flight must be >= 1, got {max_in_flight}")
    prompt_tokens = list(build_prompt(prompt))

    def resolve(utterance: Utterance) -> Path:
        if utterance.audio_path is None:
            raise AudioError(f"utterance {utterance.id!r} has no audio_path")
        path = Path(utterance.audio_path)
        if audio_root is not None and not path.is_absolute():
            path = audio_root / path
        return path

    def run_one(utterance: Utterance) -> str:
        request = AsrRequest(audio_path=resolve(utterance), prompt=prompt, model_id=model_id)
        return transcribe(
            request, endpoint, attempts=attempts, backoff_s=backoff_s, timeout_s=timeout_s
        )

    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        futures = {utterance.id: pool.submit(run_one, utterance) for utterance in manifest}
        return [
            {"id": utterance.id, "hyp": futures[utterance.id].result(), "prompt_tokens": prompt_tokens}
            for utterance in manifest
        ]


__all__ = [
    "PromptConfig",
    "AsrRequest",
    "TtsRequest",
    "DictTranslator",
    "build_prompt",
    "render_prompt",
    "transcribe",
    "synthesize",
    "translate",
    "transcribe_corpus",
    "PROMPT_LANGS",
]
