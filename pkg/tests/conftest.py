"""Shared fixtures: packaged lexicons, a planted detection corpus, audio
fixture corpora, and the acceptance-criteria terminal summary.

The planted corpus is built only from words that sit in exactly one of the
lexicon's exclusive word lists, so the true label of every token is known
by construction and the expected detector outputs can be recomputed
independently of the classifier.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

import cs_forge
from cs_forge.audio import AudioBuffer, write_wav
from cs_forge.clients import DictTranslator
from cs_forge.corpus import Manifest, Utterance, save_manifest
from cs_forge.evaluate import load_published_results
from cs_forge.langid import LangLexicon, tokenize
from cs_forge.textgen import PosLexicon

DATA_DIR = Path(cs_forge.__file__).parent / "data"

KEYWORD = "y"


# --------------------------------------------------------------------------
# packaged data
# --------------------------------------------------------------------------


@pytest.fixture(scope="session")
def lexicon_dir() -> Path:
    return DATA_DIR / "lexicon"


@pytest.fixture(scope="session")
def lexicon(lexicon_dir) -> LangLexicon:
    return LangLexicon.load(lexicon_dir)


@pytest.fixture(scope="session")
def pos_path() -> Path:
    return DATA_DIR / "pos" / "ca_pos.tsv"


@pytest.fixture(scope="session")
def pos_lexicon(pos_path) -> PosLexicon:
    return PosLexicon.load(pos_path)


@pytest.fixture(scope="session")
def dict_path() -> Path:
    return DATA_DIR / "dict" / "ca_es.tsv"


@pytest.fixture(scope="session")
def dict_translator(dict_path) -> DictTranslator:
    return DictTranslator.load(dict_path)


@pytest.fixture(scope="session")
def published_results():
    return load_published_results()


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


# --------------------------------------------------------------------------
# planted detection corpus
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlantedUtterance:
    """One fixture utterance whose per-token languages are known a priori."""

    id: str
    sequence: tuple[tuple[str, str], ...]  # (true lang, word)

    @property
    def text(self) -> str:
        return " ".join(word for _, word in self.sequence)

    @property
    def n_ca(self) -> int:
        return sum(lang == "ca" for lang, _ in self.sequence)

    @property
    def n_es(self) -> int:
        return sum(lang == "es" for lang, _ in self.sequence)

    @property
    def max_run_es(self) -> int:
        best = run = 0
        for lang, _ in self.sequence:
            run = run + 1 if lang == "es" else 0
            best = max(best, run)
        return best

    @property
    def has_keyword(self) -> bool:
        return any(word == KEYWORD for _, word in self.sequence)


@dataclass(frozen=True)
class PlantedCorpus:
    manifest: Manifest
    planted: dict[str, PlantedUtterance]

    @property
    def token_count_ids(self) -> set[str]:
        """Ids satisfying the >=3-words-each rule, from the planted truth."""
        return {u.id for u in self.planted.values() if u.n_ca >= 3 and u.n_es >= 3}

    @property
    def keyword_ids(self) -> set[str]:
        return {u.id for u in self.planted.values() if u.has_keyword}

    @property
    def low_run_keyword_ids(self) -> set[str]:
        return {u.id for u in self.planted.values() if u.has_keyword and u.max_run_es < 3}

    @property
    def high_run_keyword_ids(self) -> set[str]:
        return {u.id for u in self.planted.values() if u.has_keyword and u.max_run_es >= 3}


def _single_token_words(words) -> list[str]:
    usable = []
    for word in sorted(words):
        tokens = tokenize(word)
        if len(tokens) == 1 and tokens[0].text == word:
            usable.append(word)
    return usable


@pytest.fixture(scope="session")
def planted_corpus(lexicon) -> PlantedCorpus:
    ca_pool = _single_token_words(lexicon.ca_words)
    es_pool = [w for w in _single_token_words(lexicon.es_words) if w != KEYWORD]
    assert len(ca_pool) >= 50 and len(es_pool) >= 50, "lexicon too small for the fixture"
    rng = random.Random(97)

    def pick(pool: list[str], count: int) -> tuple[tuple[str, str], ...]:
        lang = "ca" if pool is ca_pool else "es"
        return tuple((lang, pool[rng.randrange(len(pool))]) for _ in range(count))

    items: list[tuple[str, tuple[tuple[str, str], ...]]] = []
    # 12 utterances with at least three words of each language
    for i in range(12):
        n_ca, n_es = rng.randint(3, 6), rng.randint(3, 5)
        a1, b1 = rng.randint(1, n_ca - 1), rng.randint(1, n_es - 1)
        seq = pick(ca_pool, a1) + pick(es_pool, b1) + pick(ca_pool, n_ca - a1) + pick(es_pool, n_es - b1)
        items.append((f"both-{i:02d}", seq))
    # 8 with exactly two Spanish words (below the rule)
    for i in range(8):
        seq = pick(ca_pool, rng.randint(3, 5)) + pick(es_pool, 2) + pick(ca_pool, rng.randint(0, 2))
        items.append((f"twoes-{i:02d}", seq))
    # 5 keyword utterances whose Spanish run reaches three or more
    for i in range(5):
        seq = pick(ca_pool, 3) + (("es", KEYWORD),) + pick(es_pool, rng.randint(2, 3))
        items.append((f"kwrun-{i:02d}", seq))
    # 5 keyword utterances whose longest Spanish run stays below three
    for i in range(5):
        if i % 2:
            seq = pick(ca_pool, 3) + (("es", KEYWORD),) + pick(es_pool, 1) + pick(ca_pool, 2)
        else:
            seq = pick(ca_pool, 4) + (("es", KEYWORD),) + pick(ca_pool, 2)
        items.append((f"kwlow-{i:02d}", seq))
    # 20 monolingual fillers
    for i in range(12):
        items.append((f"mono-ca-{i:02d}", pick(ca_pool, rng.randint(4, 8))))
    for i in range(8):
        items.append((f"mono-es-{i:02d}", pick(es_pool, rng.randint(4, 8))))

    genders = ("male", "female", "unspecified")
    planted: dict[str, PlantedUtterance] = {}
    entries: list[Utterance] = []
    for index, (utt_id, seq) in enumerate(items):
        plant = PlantedUtterance(id=utt_id, sequence=seq)
        planted[utt_id] = plant
        if plant.n_ca and plant.n_es:
            lang = "mixed"
        else:
            lang = "ca" if plant.n_ca else "es"
        entries.append(
            Utterance(
                id=utt_id,
                text=plant.text,
                lang=lang,
                gender=genders[index % 3],
                speaker_id=f"spk-{index % 7}",
            )
        )
    corpus = PlantedCorpus(
        manifest=Manifest(entries=tuple(entries), source_name="planted"), planted=planted
    )
    assert len(corpus.manifest) == 50
    return corpus


@pytest.fixture(scope="session")
def planted_manifest_path(planted_corpus, tmp_path_factory) -> Path:
    path = tmp_path_factory.mktemp("planted") / "manifest.jsonl"
    save_manifest(planted_corpus.manifest, path)
    return path


# --------------------------------------------------------------------------
# audio fixtures
# --------------------------------------------------------------------------


@pytest.fixture(scope="session")
def make_clip():
    """Deterministic test tones: sine plus a little noise, peak <= 0.5."""

    def _make(
        seconds: float,
        freq: float = 220.0,
        seed: int = 0,
        sample_rate: int = 16_000,
        amplitude: float = 0.4,
    ) -> AudioBuffer:
        n = int(round(seconds * sample_rate))
        t = np.arange(n) / sample_rate
        rng = np.random.default_rng(seed)
        samples = amplitude * np.sin(2 * np.pi * freq * t) + 0.05 * rng.uniform(-1.0, 1.0, n)
        return AudioBuffer(samples=np.clip(samples, -0.5, 0.5), sample_rate=sample_rate)

    return _make


@dataclass(frozen=True)
class AudioCorpus:
    root: Path
    manifest_path: Path
    manifest: Manifest


@pytest.fixture(scope="session")
def audio_corpus(tmp_path_factory, make_clip) -> AudioCorpus:
    """Twelve five-second clips (one minute total) with a manifest."""
    root = tmp_path_factory.mktemp("clips60")
    genders = ("male", "female", "unspecified")
    entries = []
    for i in range(12):
        clip = make_clip(5.0, freq=180.0 + 25.0 * i, seed=1000 + i)
        rel = f"wav/clip-{i:02d}.wav"
        write_wav(clip, root / rel)
        entries.append(
            Utterance(
                id=f"clip-{i:02d}",
                text=f"clip number {i}",
                lang="ca" if i % 2 == 0 else "es",
                audio_path=rel,
                gender=genders[i % 3],
                duration_s=5.0,
            )
        )
    manifest = Manifest(entries=tuple(entries), source_name="clips")
    manifest_path = root / "manifest.jsonl"
    save_manifest(manifest, manifest_path)
    return AudioCorpus(root=root, manifest_path=manifest_path, manifest=manifest)


@dataclass(frozen=True)
class ConcatPools:
    root: Path
    ca_path: Path
    es_path: Path
    ca_manifest: Manifest
    es_manifest: Manifest


@pytest.fixture(scope="session")
def concat_pools(tmp_path_factory, make_clip) -> ConcatPools:
    """Six clips per language with audio on disk, for tuple materialization."""
    root = tmp_path_factory.mktemp("pools")
    genders = ("male", "male", "female", "female", "female", "unspecified")

    def build(lang: str, seconds: float, base_freq: float, seed0: int) -> Manifest:
        entries = []
        for i in range(6):
            clip = make_clip(seconds, freq=base_freq + 30.0 * i, seed=seed0 + i)
            rel = f"{lang}/{lang}-{i:02d}.wav"
            write_wav(clip, root / rel)
            entries.append(
                Utterance(
                    id=f"{lang}-{i:02d}",
                    text=f"{lang} frase {i}",
                    lang=lang,
                    audio_path=rel,
                    gender=genders[i],
                    duration_s=seconds,
                )
            )
        return Manifest(entries=tuple(entries), source_name=f"{lang}-pool")

    ca_manifest = build("ca", 0.5, 200.0, 2000)
    es_manifest = build("es", 0.6, 320.0, 3000)
    ca_path, es_path = root / "ca.jsonl", root / "es.jsonl"
    save_manifest(ca_manifest, ca_path)
    save_manifest(es_manifest, es_path)
    return ConcatPools(
        root=root, ca_path=ca_path, es_path=es_path,
        ca_manifest=ca_manifest, es_manifest=es_manifest,
    )


@pytest.fixture(scope="session")
def tuple_pools_300() -> tuple[Manifest, Manifest]:
    """Metadata-only 300+300 pools with uneven gender buckets."""
    genders_ca = ["male"] * 147 + ["female"] * 148 + ["unspecified"] * 5
    genders_es = ["male"] * 150 + ["female"] * 149 + ["unspecified"] * 1
    ca = Manifest(
        entries=tuple(
            Utterance(id=f"ca-{i:03d}", text=f"frase catalana {i}", lang="ca", gender=g)
            for i, g in enumerate(genders_ca)
        ),
        source_name="ca-pool",
    )
    es = Manifest(
        entries=tuple(
            Utterance(id=f"es-{i:03d}", text=f"frase castellana {i}", lang="es", gender=g)
            for i, g in enumerate(genders_es)
        ),
        source_name="es-pool",
    )
    return ca, es


# --------------------------------------------------------------------------
# acceptance-criteria terminal summary
# --------------------------------------------------------------------------

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.passed:
        verdict = "PASS"
    elif report.skipped:
        verdict = "SKIP"
    else:
        verdict = "FAIL"
    _ACCEPTANCE_RESULTS.append((marker.args[0], verdict))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, verdict in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{verdict}  {label}")
