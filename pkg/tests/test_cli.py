"""End-to-end tests for the command-line interface.

These exercise argument wiring, exit codes, and the exact summary lines;
the underlying numerics are covered by the per-module suites. Every
randomized command is run twice to confirm byte-identical artifacts.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from cs_forge import evaluate, review
from cs_forge.augment import STAGE_ORDER
from cs_forge.cli import cli
from cs_forge.corpus import Manifest, Utterance, load_manifest, save_manifest
from cs_forge.evaluate import load_published_results, results_lines
from cs_forge.textgen import route_segments

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

SUBCOMMANDS = (
    "split",
    "detect",
    "textgen",
    "concat",
    "augment",
    "prompt",
    "eval",
    "review-serve",
    "export",
)


def invoke_ok(runner, args, **kwargs):
    result = runner.invoke(cli, args, **kwargs)
    assert result.exit_code == 0, result.output
    return result


# --------------------------------------------------------------------------
# top level
# --------------------------------------------------------------------------


class TestTopLevel:
    def test_help_lists_every_subcommand(self, runner):
        result = invoke_ok(runner, ["--help"])
        for name in SUBCOMMANDS:
            assert name in result.output

    @pytest.mark.parametrize("name", SUBCOMMANDS)
    def test_subcommand_help(self, runner, name):
        invoke_ok(runner, [name, "--help"])

    def test_version(self, runner):
        result = invoke_ok(runner, ["--version"])
        assert "version" in result.output

    def test_unknown_command_is_usage_error(self, runner):
        result = runner.invoke(cli, ["frobnicate"])
        assert result.exit_code == 2

    def test_missing_input_file_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(
            cli,
            [
                "split",
                "--manifest", str(tmp_path / "nope.jsonl"),
                "--seed", "1",
                "--train-out", str(tmp_path / "a.jsonl"),
                "--rest-out", str(tmp_path / "b.jsonl"),
            ],
        )
        assert result.exit_code == 2
        assert "does not exist" in result.output


# --------------------------------------------------------------------------
# split
# --------------------------------------------------------------------------


@pytest.fixture()
def small_manifest(tmp_path) -> Path:
    manifest = Manifest(
        entries=tuple(
            Utterance(id=f"u-{i:02d}", text=f"frase {i}", lang="ca") for i in range(10)
        ),
        source_name="demo",
    )
    path = tmp_path / "man.jsonl"
    save_manifest(manifest, path)
    return path


class TestSplit:
    def test_partitions_and_reports(self, runner, tmp_path, small_manifest):
        train_path = tmp_path / "train.jsonl"
        rest_path = tmp_path / "rest.jsonl"
        result = invoke_ok(
            runner,
            [
                "split",
                "--manifest", str(small_manifest),
                "--seed", "7",
                "--train-out", str(train_path),
                "--rest-out", str(rest_path),
            ],
        )
        assert result.output == (
            f"10 entries -> 7 train ({train_path}), 3 held out ({rest_path})\n"
        )
        train = load_manifest(train_path)
        rest = load_manifest(rest_path)
        assert len(train) == 7 and len(rest) == 3
        ids = {u.id for u in train} | {u.id for u in rest}
        assert ids == {f"u-{i:02d}" for i in range(10)}
        assert not ({u.id for u in train} & {u.id for u in rest})

    def test_same_seed_is_byte_identical(self, runner, tmp_path, small_manifest):
        outputs = []
        for run in ("one", "two"):
            train_path = tmp_path / f"train-{run}.jsonl"
            rest_path = tmp_path / f"rest-{run}.jsonl"
            invoke_ok(
                runner,
                [
                    "split",
                    "--manifest", str(small_manifest),
                    "--seed", "7",
                    "--train-out", str(train_path),
                    "--rest-out", str(rest_path),
                ],
            )
            outputs.append((train_path.read_bytes(), rest_path.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_bad_fraction_is_pipeline_error(self, runner, tmp_path, small_manifest):
        result = runner.invoke(
            cli,
            [
                "split",
                "--manifest", str(small_manifest),
                "--train-fraction", "1.5",
                "--seed", "1",
                "--train-out", str(tmp_path / "a.jsonl"),
                "--rest-out", str(tmp_path / "b.jsonl"),
            ],
        )
        assert result.exit_code == 1
        assert "train_fraction" in result.output


# --------------------------------------------------------------------------
# detect
# --------------------------------------------------------------------------


class TestDetect:
    def test_keyword_scan_writes_candidates(
        self, runner, tmp_path, planted_manifest_path, planted_corpus, lexicon_dir
    ):
        out_path = tmp_path / "cand.jsonl"
        result = invoke_ok(
            runner,
            [
                "detect",
                "--manifest", str(planted_manifest_path),
                "--lexicon", str(lexicon_dir),
                "--method", "keyword",
                "--out", str(out_path),
            ],
        )
        expected = planted_corpus.keyword_ids
        assert result.output == (
            f"scanned 50 utterances: {len(expected)} candidates "
            f"({len(expected)} pending, 0 auto-accepted) -> {out_path}\n"
        )
        records = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert {r["id"] for r in records} == expected
        assert all(r["status"] == "pending" for r in records)

    def test_token_count_scan_auto_accepts(
        self, runner, tmp_path, planted_manifest_path, planted_corpus, lexicon_dir
    ):
        out_path = tmp_path / "cand.jsonl"
        result = invoke_ok(
            runner,
            [
                "detect",
                "--manifest", str(planted_manifest_path),
                "--lexicon", str(lexicon_dir),
                "--method", "token_count",
                "--out", str(out_path),
            ],
        )
        expected = planted_corpus.token_count_ids
        assert result.output == (
            f"scanned 50 utterances: {len(expected)} candidates "
            f"(0 pending, {len(expected)} auto-accepted) -> {out_path}\n"
        )
        records = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert {r["id"] for r in records} == expected
        assert all(r["status"] == "accepted" for r in records)

    def test_unknown_method_is_usage_error(
        self, runner, tmp_path, planted_manifest_path, lexicon_dir
    ):
        result = runner.invoke(
            cli,
            [
                "detect",
                "--manifest", str(planted_manifest_path),
                "--lexicon", str(lexicon_dir),
                "--method", "telepathy",
                "--out", str(tmp_path / "cand.jsonl"),
            ],
        )
        assert result.exit_code == 2


# --------------------------------------------------------------------------
# textgen
# --------------------------------------------------------------------------


@pytest.fixture()
def textgen_manifest(tmp_path) -> Path:
    manifest = Manifest(
        entries=(
            Utterance(id="t-1", text="el gos gran menja sota la taula", lang="ca"),
            Utterance(id="t-2", text="la dona obre la porta", lang="ca"),
            # two tokens: dropped by the length filter (default minimum is 4)
            Utterance(id="t-3", text="corre molt", lang="ca"),
            # long enough but contains no noun chunk
            Utterance(id="t-4", text="sempre canta sense parar", lang="ca"),
            # wrong language: ignored entirely
            Utterance(id="t-5", text="hola", lang="es"),
        ),
        source_name="text",
    )
    path = tmp_path / "text.jsonl"
    save_manifest(manifest, path)
    return path


class TestTextgen:
    def test_generates_and_reports(
        self, runner, tmp_path, textgen_manifest, pos_path, dict_path
    ):
        out_path = tmp_path / "cs.jsonl"
        tagged_path = tmp_path / "cs.txt"
        result = invoke_ok(
            runner,
            [
                "textgen",
                "--manifest", str(textgen_manifest),
                "--pos", str(pos_path),
                "--dict", str(dict_path),
                "--seed", "11",
                "--out", str(out_path),
                "--tagged", str(tagged_path),
            ],
        )
        assert result.output == (
            "2 sentences generated (1 filtered by length, 1 without a noun chunk) "
            f"-> {out_path}\n"
        )
        records = [json.loads(line) for line in out_path.read_text().splitlines()]
        assert [r["id"] for r in records] == ["cs-t-1", "cs-t-2"]
        assert [r["source_id"] for r in records] == ["t-1", "t-2"]
        for record in records:
            assert record["lang"] == "mixed"
            # the markup must parse and reconstruct the plain sentence
            segments = route_segments(record["tagged"])
            assert " ".join(text for _, text in segments) == record["text"]
            assert any(lang == "esp" for lang, _ in segments)
        assert tagged_path.read_text().splitlines() == [r["tagged"] for r in records]

    def test_same_seed_is_byte_identical(
        self, runner, tmp_path, textgen_manifest, pos_path, dict_path
    ):
        outputs = []
        for run in ("one", "two"):
            out_path = tmp_path / f"cs-{run}.jsonl"
            invoke_ok(
                runner,
                [
                    "textgen",
                    "--manifest", str(textgen_manifest),
                    "--pos", str(pos_path),
                    "--dict", str(dict_path),
                    "--seed", "11",
                    "--out", str(out_path),
                ],
            )
            outputs.append(out_path.read_bytes())
        assert outputs[0] == outputs[1]

    def test_requires_exactly_one_translator(
        self, runner, tmp_path, textgen_manifest, pos_path, dict_path
    ):
        base = [
            "textgen",
            "--manifest", str(textgen_manifest),
            "--pos", str(pos_path),
            "--seed", "1",
            "--out", str(tmp_path / "x.jsonl"),
        ]
        neither = runner.invoke(cli, base, env={"CS_FORGE_MT_URL": None})
        assert neither.exit_code == 2
        assert "exactly one of --dict or --mt-endpoint" in neither.output
        both = runner.invoke(
            cli,
            base + ["--dict", str(dict_path), "--mt-endpoint", "http://localhost:1"],
        )
        assert both.exit_code == 2
        assert "exactly one of --dict or --mt-endpoint" in both.output


# --------------------------------------------------------------------------
# concat
# --------------------------------------------------------------------------


class TestConcat:
    def _run(self, runner, concat_pools, out_dir) -> object:
        return invoke_ok(
            runner,
            [
                "concat",
                "--ca", str(concat_pools.ca_path),
                "--es", str(concat_pools.es_path),
                "--audio-root", str(concat_pools.root),
                "--out-dir", str(out_dir),
                "--seed", "5",
                "--gap-s", "0.25",
            ],
        )

    def test_materializes_tuples(self, runner, tmp_path, concat_pools):
        out_dir = tmp_path / "tuples"
        result = self._run(runner, concat_pools, out_dir)
        assert result.output == (
            f"6 tuples (3 ca_es, 3 es_ca), 0.00 h -> {out_dir / 'tuples.jsonl'}\n"
        )
        records = [
            json.loads(line)
            for line in (out_dir / "tuples.jsonl").read_text().splitlines()
        ]
        assert len(records) == 6
        for record in records:
            assert record["lang"] == "mixed"
            assert record["duration_s"] == pytest.approx(0.5 + 0.25 + 0.6)
            wav_path = out_dir / record["audio_path"]
            assert wav_path.is_file()
            assert record["id"] == f"{record['first_id']}__{record['second_id']}"
        # every clip from each pool is used exactly once
        firsts = {r["first_id"] for r in records} | {r["second_id"] for r in records}
        assert firsts == {f"ca-{i:02d}" for i in range(6)} | {
            f"es-{i:02d}" for i in range(6)
        }

    def test_same_seed_is_byte_identical(self, runner, tmp_path, concat_pools):
        dirs = (tmp_path / "one", tmp_path / "two")
        for out_dir in dirs:
            self._run(runner, concat_pools, out_dir)
        first, second = dirs
        assert (first / "tuples.jsonl").read_bytes() == (second / "tuples.jsonl").read_bytes()
        wavs = sorted(p.name for p in (first / "audio").iterdir())
        assert wavs == sorted(p.name for p in (second / "audio").iterdir())
        for name in wavs:
            assert (first / "audio" / name).read_bytes() == (
                second / "audio" / name
            ).read_bytes()


# --------------------------------------------------------------------------
# augment
# --------------------------------------------------------------------------


@pytest.fixture()
def augment_corpus(tmp_path, make_clip):
    root = tmp_path / "clips"
    entries = []
    for i in range(2):
        rel = f"wav/c{i}.wav"
        clip = make_clip(1.0, freq=200.0 + 40.0 * i, seed=50 + i)
        from cs_forge.audio import write_wav

        write_wav(clip, root / rel)
        entries.append(
            Utterance(id=f"c{i}", text=f"clip {i}", lang="ca", audio_path=rel, duration_s=1.0)
        )
    manifest_path = root / "manifest.jsonl"
    save_manifest(Manifest(entries=tuple(entries), source_name="aug"), manifest_path)
    return root, manifest_path


class TestAugment:
    def test_augments_with_pseudo_noise_notice(self, runner, tmp_path, augment_corpus):
        root, manifest_path = augment_corpus
        out_dir = tmp_path / "aug"
        result = invoke_ok(
            runner,
            [
                "augment",
                "--manifest", str(manifest_path),
                "--audio-root", str(root),
                "--out-dir", str(out_dir),
                "--seed", "5",
            ],
        )
        assert result.stderr == "no --noise-dir given; using generated pseudo-noise\n"
        assert f"2 clips augmented -> {out_dir / 'augmented.jsonl'}" in result.output
        records = [
            json.loads(line)
            for line in (out_dir / "augmented.jsonl").read_text().splitlines()
        ]
        assert [r["id"] for r in records] == ["c0", "c1"]
        for record in records:
            assert (out_dir / record["audio_path"]).is_file()
            assert [s["stage"] for s in record["augmentation"]] == list(STAGE_ORDER)

    def test_noise_disabled_config_suppresses_notice(
        self, runner, tmp_path, augment_corpus
    ):
        root, manifest_path = augment_corpus
        config_path = tmp_path / "cfg.json"
        config_path.write_text(json.dumps({"noise": {"p": 0.0}}), encoding="utf-8")
        result = invoke_ok(
            runner,
            [
                "augment",
                "--manifest", str(manifest_path),
                "--audio-root", str(root),
                "--out-dir", str(tmp_path / "aug"),
                "--seed", "5",
                "--config", str(config_path),
            ],
        )
        assert result.stderr == ""
        records = [
            json.loads(line)
            for line in (tmp_path / "aug" / "augmented.jsonl").read_text().splitlines()
        ]
        noise_entries = [
            s for r in records for s in r["augmentation"] if s["stage"] == "noise"
        ]
        assert noise_entries and not any(s["applied"] for s in noise_entries)

    def test_same_seed_is_byte_identical(self, runner, tmp_path, augment_corpus):
        root, manifest_path = augment_corpus
        dirs = (tmp_path / "one", tmp_path / "two")
        for out_dir in dirs:
            invoke_ok(
                runner,
                [
                    "augment",
                    "--manifest", str(manifest_path),
                    "--audio-root", str(root),
                    "--out-dir", str(out_dir),
                    "--seed", "5",
                ],
            )
        first, second = dirs
        assert (first / "augmented.jsonl").read_bytes() == (
            second / "augmented.jsonl"
        ).read_bytes()
        for name in ("c0.wav", "c1.wav"):
            assert (first / "audio" / name).read_bytes() == (
                second / "audio" / name
            ).read_bytes()

    def test_missing_audio_path_is_pipeline_error(self, runner, tmp_path):
        manifest_path = tmp_path / "man.jsonl"
        save_manifest(
            Manifest(
                entries=(Utterance(id="no-audio", text="x", lang="ca"),),
                source_name="bad",
            ),
            manifest_path,
        )
        result = runner.invoke(
            cli,
            [
                "augment",
                "--manifest", str(manifest_path),
                "--audio-root", str(tmp_path),
                "--out-dir", str(tmp_path / "aug"),
                "--seed", "1",
            ],
        )
        assert result.exit_code == 1
        assert "no audio_path" in result.output


# --------------------------------------------------------------------------
# prompt
# --------------------------------------------------------------------------


class TestPrompt:
    def test_default_prompt(self, runner):
        result = invoke_ok(runner, ["prompt"])
        assert result.output == "<|startoftranscript|><|transcribe|><|notimestamps|>\n"

    def test_language_tokens(self, runner):
        result = invoke_ok(runner, ["prompt", "--tokens", "ca,es"])
        assert result.output == (
            "<|startoftranscript|><|ca|><|es|><|transcribe|><|notimestamps|>\n"
        )

    def test_timestamps_drop_suffix(self, runner):
        result = invoke_ok(runner, ["prompt", "--tokens", "es", "--timestamps"])
        assert result.output == "<|startoftranscript|><|es|><|transcribe|>\n"

    def test_previous_text_prefix(self, runner):
        result = invoke_ok(
            runner, ["prompt", "--tokens", "ca", "--previous", "hola que tal"]
        )
        assert result.output == (
            "<|startofprev|>hola que tal"
            "<|startoftranscript|><|ca|><|transcribe|><|notimestamps|>\n"
        )


# --------------------------------------------------------------------------
# eval
# --------------------------------------------------------------------------


@pytest.fixture()
def scoring_files(tmp_path):
    refs = Manifest(
        entries=(
            Utterance(id="r-1", text="bon dia a tothom", lang="ca"),
            Utterance(id="r-2", text="hola que tal amics meus", lang="mixed"),
        ),
        source_name="demo-set",
    )
    refs_path = tmp_path / "refs.jsonl"
    save_manifest(refs, refs_path)
    hyps_path = tmp_path / "hyps.jsonl"
    hyps_path.write_text(
        json.dumps({"id": "r-1", "hyp": "bon dia a tothom"})
        + "\n"
        + json.dumps({"id": "r-2", "hyp": "hola que tal amigos meus"})
        + "\n",
        encoding="utf-8",
    )
    return refs_path, hyps_path


@pytest.fixture()
def published_results_path(tmp_path, published_results) -> Path:
    path = tmp_path / "results.jsonl"
    path.write_text(
        "".join(line + "\n" for line in results_lines(published_results)),
        encoding="utf-8",
    )
    return path


class TestEvalRefsMode:
    def test_scores_and_reports(self, runner, tmp_path, scoring_files):
        refs_path, hyps_path = scoring_files
        report_dir = tmp_path / "report"
        result = invoke_ok(
            runner,
            [
                "eval",
                "--refs", str(refs_path),
                "--hyps", str(hyps_path),
                "--report-dir", str(report_dir),
                "--dataset", "Demo",
            ],
        )
        lines = result.output.splitlines()
        # one substitution over nine reference words, pooled
        assert lines[0] == (
            "Demo: WER 11.11% over 2 utterances "
            "(S=1 D=0 I=0 ref=9; per-utterance mean 10.00%)"
        )
        assert "Experiment" in lines[1] and "Demo" in lines[1]
        assert "Base model" in result.output
        tsv_path = report_dir / "report.tsv"
        assert tsv_path.read_text(encoding="utf-8") == (
            "id\twer_pct\tsubstitutions\tdeletions\tinsertions\tref_len\n"
            "r-1\t0.0000\t0\t0\t0\t4\n"
            "r-2\t20.0000\t1\t0\t0\t5\n"
        )
        chart_path = report_dir / "wer_hist.png"
        assert chart_path.read_bytes()[:8] == PNG_MAGIC
        assert f"report -> {tsv_path}, chart -> {chart_path}" in result.output

    def test_dataset_defaults_to_manifest_name(self, runner, scoring_files):
        refs_path, hyps_path = scoring_files
        result = invoke_ok(
            runner, ["eval", "--refs", str(refs_path), "--hyps", str(hyps_path)]
        )
        # falls back to the manifest file's stem
        assert result.output.startswith("refs: WER 11.11%")

    def test_experiment_and_tokens_recorded(self, runner, scoring_files):
        refs_path, hyps_path = scoring_files
        result = invoke_ok(
            runner,
            [
                "eval",
                "--refs", str(refs_path),
                "--hyps", str(hyps_path),
                "--experiment", "synthetic",
                "--tokens", "ca,es",
                "--report", "lines",
                "--dataset", "Demo",
            ],
        )
        record = json.loads(result.output.splitlines()[-1])
        assert record["experiment"] == "synthetic"
        assert record["decoding_tokens"] == ["ca", "es"]
        assert record["dataset"] == "Demo"
        assert record["wer_pct"] == pytest.approx(100.0 / 9.0)


class TestEvalResultsMode:
    def test_table_and_artifacts(self, runner, tmp_path, published_results_path,
                                 published_results):
        report_dir = tmp_path / "report"
        result = invoke_ok(
            runner,
            [
                "eval",
                "--results", str(published_results_path),
                "--report-dir", str(report_dir),
                "--best", "TV3",
            ],
        )
        table = evaluate.results_table(published_results)
        assert table in result.output
        assert result.output.rstrip().endswith("best on TV3: tv3 <ca> at 21.20%")
        assert (report_dir / "table.txt").read_text(encoding="utf-8") == table + "\n"
        tsv_lines = (report_dir / "results.tsv").read_text(encoding="utf-8").splitlines()
        assert tsv_lines[0] == "experiment\tdecoding_tokens\tdataset\twer_pct"
        assert tsv_lines[1] == "base\t\tTV3\t31.96"
        assert len(tsv_lines) == 1 + len(published_results)
        assert (report_dir / "wer_bars.png").read_bytes()[:8] == PNG_MAGIC

    def test_lines_report_round_trips(self, runner, published_results_path,
                                      published_results):
        result = invoke_ok(
            runner,
            ["eval", "--results", str(published_results_path), "--report", "lines"],
        )
        assert result.output.splitlines() == results_lines(published_results)

    @pytest.mark.parametrize(
        "dataset, expected",
        [
            ("TV3", "best on TV3: tv3 <ca> at 21.20%"),
            ("ParlamentParla", "best on ParlamentParla: synthetic <ca> at 14.48%"),
            ("Corts", "best on Corts: synthetic <ca> at 22.42%"),
        ],
    )
    def test_best_configuration_lines(self, runner, published_results_path,
                                      dataset, expected):
        result = invoke_ok(
            runner,
            ["eval", "--results", str(published_results_path), "--best", dataset],
        )
        assert result.output.rstrip().endswith(expected)


class TestEvalUsageErrors:
    def test_refs_and_results_conflict(self, runner, scoring_files,
                                       published_results_path):
        refs_path, hyps_path = scoring_files
        result = runner.invoke(
            cli,
            [
                "eval",
                "--refs", str(refs_path),
                "--hyps", str(hyps_path),
                "--results", str(published_results_path),
            ],
        )
        assert result.exit_code == 2
        assert "either --refs/--hyps or --results" in result.output

    def test_no_mode_selected(self, runner):
        result = runner.invoke(cli, ["eval"])
        assert result.exit_code == 2

    def test_refs_without_hyps(self, runner, scoring_files):
        refs_path, _ = scoring_files
        result = runner.invoke(cli, ["eval", "--refs", str(refs_path)])
        assert result.exit_code == 2
        assert "--refs requires --hyps" in result.output


# --------------------------------------------------------------------------
# export
# --------------------------------------------------------------------------


class TestExport:
    @pytest.fixture()
    def candidates_path(self, runner, tmp_path, lexicon_dir) -> Path:
        manifest = Manifest(
            entries=(
                Utterance(id="k-1", text="bon dia y luego vamos casa", lang="mixed"),
                Utterance(id="k-2", text="molt bona tarda amics", lang="ca"),
            ),
            source_name="kw",
        )
        manifest_path = tmp_path / "kw.jsonl"
        save_manifest(manifest, manifest_path)
        out_path = tmp_path / "cand.jsonl"
        invoke_ok(
            runner,
            [
                "detect",
                "--manifest", str(manifest_path),
                "--lexicon", str(lexicon_dir),
                "--method", "keyword",
                "--out", str(out_path),
            ],
        )
        return out_path

    def test_exports_accepted_candidates(self, runner, tmp_path, candidates_path):
        # decide through the store so the default decision log is populated
        store = review.ReviewStore.load(
            candidates_path, candidates_path.with_suffix(".jsonl.decisions")
        )
        store.decide("k-1", "accept", annotator="ann")
        out_path = tmp_path / "accepted.jsonl"
        result = invoke_ok(
            runner,
            ["export", "--candidates", str(candidates_path), "--out", str(out_path)],
        )
        assert result.output == f"1 accepted utterances -> {out_path}\n"
        exported = load_manifest(out_path)
        assert [u.id for u in exported] == ["k-1"]
        assert exported.entries[0].text == "bon dia y luego vamos casa"

    def test_without_decisions_exports_nothing(self, runner, tmp_path, candidates_path):
        out_path = tmp_path / "accepted.jsonl"
        result = invoke_ok(
            runner,
            ["export", "--candidates", str(candidates_path), "--out", str(out_path)],
        )
        assert result.output == f"0 accepted utterances -> {out_path}\n"
        assert load_manifest(out_path).entries == ()
