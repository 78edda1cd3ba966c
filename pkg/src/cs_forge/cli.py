"""Command-line front-end for the corpus pipelines.

Exit codes: 0 success, 1 pipeline error (bad data, I/O, rule violations),
2 usage error (unknown flags, missing files). Every randomized command
takes a required --seed and produces byte-identical artifacts for equal
inputs and seed.
"""

from __future__ import annotations

import functools
import json
from pathlib import Path

import click

from . import augment as augment_mod
from . import clients, concat, detect, evaluate, figures, review, textgen
from .audio import CANONICAL_RATE, read_wav, resample_linear, write_wav
from .corpus import SplitSpec, load_manifest, save_manifest, split_manifest, write_records
from .errors import CsForgeError
from .langid import LangLexicon


def pipeline_errors(fn):
    """Map library and I/O failures to exit code 1 with a clean message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CsForgeError as exc:
            raise click.ClickException(str(exc)) from exc
        except OSError as exc:
            raise click.ClickException(f"{exc}") from exc

    return wrapper


@click.group()
@click.version_option(package_name="cs-forge")
def cli() -> None:
    """Corpus construction and evaluation for Catalan–Spanish code-switching."""


@cli.command("split")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--train-fraction", type=float, default=0.7, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--train-out", "train_path", type=click.Path(dir_okay=False), required=True)
@click.option("--rest-out", "rest_path", type=click.Path(dir_okay=False), required=True)
@pipeline_errors
def cmd_split(manifest_path, train_fraction, seed, train_path, rest_path):
    """Split a manifest into train and held-out parts, deterministically."""
    manifest = load_manifest(manifest_path)
    spec = SplitSpec(train_fraction=train_fraction, seed=seed)
    train, rest = split_manifest(manifest, spec)
    save_manifest(train, train_path)
    save_manifest(rest, rest_path)
    click.echo(
        f"{len(manifest)} entries -> {len(train)} train ({train_path}), "
        f"{len(rest)} held out ({rest_path})"
    )


@cli.command("detect")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--lexicon", "lexicon_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--method", type=click.Choice(detect.DETECTION_METHODS), required=True)
@click.option("--keywords", "keywords_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="One keyword per line; defaults to the built-in list.")
@click.option("--min-each", type=int, default=detect.MIN_WORDS_EACH, show_default=True,
              help="Words required per language by the token-count method.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@pipeline_errors
def cmd_detect(manifest_path, lexicon_dir, method, keywords_path, min_each, out_path):
    """Scan a manifest for code-switching candidates."""
    manifest = load_manifest(manifest_path)
    lexicon = LangLexicon.load(lexicon_dir)
    keywords = detect.KeywordSet.load(keywords_path) if keywords_path else None
    candidates = detect.scan_corpus(manifest, method, lexicon, keywords=keywords, min_each=min_each)
    by_id = {u.id: u for u in manifest}
    write_records(
        (detect.candidate_to_record(c, by_id[c.utterance_id]) for c in candidates),
        out_path,
    )
    pending = sum(c.status == "pending" for c in candidates)
    accepted = sum(c.status == "accepted" for c in candidates)
    click.echo(
        f"scanned {len(manifest)} utterances: {len(candidates)} candidates "
        f"({pending} pending, {accepted} auto-accepted) -> {out_path}"
    )


@cli.command("textgen")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--pos", "pos_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--dict", "dict_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="ca→es TSV for offline translation.")
@click.option("--mt-endpoint", envvar="CS_FORGE_MT_URL", default=None,
              help="Translation service base URL.")
@click.option("--seed", type=int, required=True)
@click.option("--min-tokens", type=int, default=textgen.DEFAULT_MIN_TOKENS, show_default=True)
@click.option("--max-tokens", type=int, default=textgen.DEFAULT_MAX_TOKENS, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--tagged", "tagged_path", type=click.Path(dir_okay=False), default=None,
              help="Also write the raw tagged sentences, one per line.")
@pipeline_errors
def cmd_textgen(manifest_path, pos_path, dict_path, mt_endpoint, seed,
                min_tokens, max_tokens, out_path, tagged_path):
    """Generate synthetic code-switched sentences from Catalan text."""
    if (dict_path is None) == (mt_endpoint is None):
        raise click.UsageError("pass exactly one of --dict or --mt-endpoint")
    manifest = load_manifest(manifest_path)
    pos = textgen.PosLexicon.load(pos_path)
    if dict_path is not None:
        translator = clients.DictTranslator.load(dict_path)
    else:
        def translator(text: str) -> str:
            return clients.translate(text, endpoint=mt_endpoint)

    catalan = [u for u in manifest if u.lang == "ca"]
    usable = textgen.filter_by_length(catalan, min_tokens, max_tokens)
    records = []
    tagged_lines = []
    skipped = 0
    for utterance in usable:
        sentence = textgen.generate_cs_sentence(utterance, pos, translator, rng_seed=seed)
        if sentence is None:
            skipped += 1
            continue
        rendered = textgen.render_tagged(sentence)
        records.append(
            {
                "id": f"cs-{utterance.id}",
                "source_id": utterance.id,
                "text": sentence.sentence,
                "lang": "mixed",
                "tagged": rendered,
            }
        )
        tagged_lines.append(rendered)
    write_records(records, out_path)
    if tagged_path is not None:
        Path(tagged_path).write_text("".join(line + "\n" for line in tagged_lines), encoding="utf-8")
    click.echo(
        f"{len(records)} sentences generated ({len(catalan) - len(usable)} filtered by length, "
        f"{skipped} without a noun chunk) -> {out_path}"
    )


@cli.command("concat")
@click.option("--ca", "ca_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--es", "es_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--audio-root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--gap-s", type=float, default=0.0, show_default=True,
              help="Silence inserted between the two clips.")
@click.option("--balance-gender/--no-balance-gender", default=True, show_default=True)
@click.option("--sample-rate", type=int, default=CANONICAL_RATE, show_default=True)
@pipeline_errors
def cmd_concat(ca_path, es_path, audio_root, out_dir, seed, gap_s, balance_gender, sample_rate):
    """Concatenate Catalan and Spanish clips into code-switched tuples."""
    ca_manifest = load_manifest(ca_path)
    es_manifest = load_manifest(es_path)
    plan = concat.TuplePlan(
        ca_pool=ca_manifest,
        es_pool=es_manifest,
        gap_s=gap_s,
        seed=seed,
        balance_gender=balance_gender,
    )
    planned = concat.plan_tuples(plan)
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    ca_by_id = {u.id: u for u in ca_manifest}
    es_by_id = {u.id: u for u in es_manifest}
    pairs = []
    records = []
    for entry in planned:
        rel_path = Path("audio") / f"{entry.ca_id}__{entry.es_id}.wav"
        pair = concat.materialize_tuple(
            entry,
            ca_by_id,
            es_by_id,
            audio_root=Path(audio_root),
            out_path=out_dir / rel_path,
            gap_s=gap_s,
            sample_rate=sample_rate,
        )
        record = pair.to_record()
        record["audio_path"] = str(rel_path)
        pairs.append(pair)
        records.append(record)
    write_records(records, out_dir / "tuples.jsonl")
    n_ca_es = sum(p.order == "ca_es" for p in pairs)
    click.echo(
        f"{len(pairs)} tuples ({n_ca_es} ca_es, {len(pairs) - n_ca_es} es_ca), "
        f"{concat.total_duration(pairs):.2f} h -> {out_dir / 'tuples.jsonl'}"
    )


@cli.command("augment")
@click.option("--manifest", "manifest_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--audio-root", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--noise-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="WAV bank for the noise stage; omitted → generated pseudo-noise.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON per-stage overrides.")
@pipeline_errors
def cmd_augment(manifest_path, audio_root, out_dir, seed, noise_dir, config_path):
    """Run the augmentation chain over every clip of a manifest."""
    manifest = load_manifest(manifest_path)
    if config_path is not None:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8"))
        cfg = augment_mod.AugmentationConfig.from_dict(raw, seed=seed)
    else:
        cfg = augment_mod.AugmentationConfig(seed=seed)
    if noise_dir is not None:
        noise_bank = augment_mod.load_noise_dir(noise_dir)
    elif cfg.noise.p > 0:
        noise_bank = [
            augment_mod.pseudo_noise(seed=augment_mod.derive_seed(seed, "pseudo-noise"))
        ]
        click.echo("no --noise-dir given; using generated pseudo-noise", err=True)
    else:
        noise_bank = []

    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    records = []
    for utterance in manifest:
        if utterance.audio_path is None:
            raise click.ClickException(f"utterance {utterance.id!r} has no audio_path")
        buffer = read_wav(Path(audio_root) / utterance.audio_path)
        buffer = resample_linear(buffer, CANONICAL_RATE)
        augmented, applied = augment_mod.augment_utterance(
            buffer, cfg, utterance.id, noise_bank=noise_bank
        )
        rel_path = Path("audio") / f"{utterance.id}.wav"
        write_wav(augmented, out_dir / rel_path)
        record = utterance.to_record()
        record["audio_path"] = str(rel_path)
        record["duration_s"] = augmented.duration_s
        record["augmentation"] = applied
        records.append(record)
    write_records(records, out_dir / "augmented.jsonl")
    click.echo(f"{len(records)} clips augmented -> {out_dir / 'augmented.jsonl'}")


@cli.command("prompt")
@click.option("--tokens", default="", show_default=True,
              help="Comma-separated language tokens, e.g. 'ca,es'.")
@click.option("--previous", default=None, help="Context text prepended to the prompt.")
@click.option("--timestamps", is_flag=True, default=False)
@pipeline_errors
def cmd_prompt(tokens, previous, timestamps):
    """Print the decoding prompt for a language-token configuration."""
    lang_tokens = tuple(t.strip() for t in tokens.split(",") if t.strip())
    config = clients.PromptConfig(
        lang_tokens=lang_tokens, timestamps=timestamps, previous_text=previous
    )
    click.echo(clients.render_prompt(config))


@cli.command("eval")
@click.option("--refs", "refs_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--hyps", "hyps_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--results", "results_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Aggregate existing result records instead of scoring.")
@click.option("--report", type=click.Choice(["table", "lines"]), default="table", show_default=True)
@click.option("--report-dir", type=click.Path(file_okay=False), default=None,
              help="Write the delimited report and charts here.")
@click.option("--normalize/--no-normalize", default=True, show_default=True)
@click.option("--experiment", type=click.Choice(evaluate.EXPERIMENTS), default="base", show_default=True)
@click.option("--tokens", default="", help="Decoding tokens used, e.g. 'ca,es'.")
@click.option("--dataset", default=None, help="Dataset label; defaults to the manifest name.")
@click.option("--best", "best_dataset", default=None,
              help="Also print the best configuration for this dataset.")
@pipeline_errors
def cmd_eval(refs_path, hyps_path, results_path, report, report_dir, normalize,
             experiment, tokens, dataset, best_dataset):
    """Score hypotheses against references, or lay out result records."""
    if (results_path is None) == (refs_path is None):
        raise click.UsageError("pass either --refs/--hyps or --results")
    report_dir = Path(report_dir) if report_dir else None
    if report_dir:
        report_dir.mkdir(parents=True, exist_ok=True)

    if results_path is not None:
        records = evaluate.load_results(results_path)
        _emit_results(records, report, report_dir)
    else:
        if hyps_path is None:
            raise click.UsageError("--refs requires --hyps")
        refs = load_manifest(refs_path)
        hyps = evaluate.load_hypotheses(hyps_path)
        scored = evaluate.utterance_wers(refs, hyps, normalize=normalize)
        record = evaluate.evaluate_set(
            refs,
            hyps,
            experiment=experiment,
            decoding_tokens=tuple(t.strip() for t in tokens.split(",") if t.strip()),
            dataset=dataset,
            normalize=normalize,
        )
        counts = record.counts
        click.echo(
            f"{record.dataset}: WER {record.wer_pct:.2f}% over {record.n_utterances} utterances "
            f"(S={counts.substitutions} D={counts.deletions} I={counts.insertions} "
            f"ref={counts.ref_len}; per-utterance mean {record.mean_utterance_wer_pct:.2f}%)"
        )
        _emit_results([record], report, None)
        if report_dir:
            tsv_path = report_dir / "report.tsv"
            with tsv_path.open("w", encoding="utf-8") as fh:
                fh.write("id\twer_pct\tsubstitutions\tdeletions\tinsertions\tref_len\n")
                for entry in scored:
                    c = entry.counts
                    fh.write(
                        f"{entry.utterance_id}\t{entry.wer_pct:.4f}\t{c.substitutions}"
                        f"\t{c.deletions}\t{c.insertions}\t{c.ref_len}\n"
                    )
            chart = figures.render_wer_histogram(
                scored, report_dir / "wer_hist.png", title=f"{record.dataset}: per-utterance WER"
            )
            click.echo(f"report -> {tsv_path}, chart -> {chart}")
        records = [record]

    if best_dataset is not None:
        exp, best_tokens, wer_pct = evaluate.best_configuration(records, best_dataset)
        label = evaluate.format_tokens(best_tokens) or "(none)"
        click.echo(f"best on {best_dataset}: {exp} {label} at {wer_pct:.2f}%")


def _emit_results(records, report, report_dir):
    if report == "table":
        click.echo(evaluate.results_table(records))
    else:
        for line in evaluate.results_lines(records):
            click.echo(line)
    if report_dir:
        table_path = report_dir / "table.txt"
        table_path.write_text(evaluate.results_table(records) + "\n", encoding="utf-8")
        tsv_path = report_dir / "results.tsv"
        with tsv_path.open("w", encoding="utf-8") as fh:
            fh.write("experiment\tdecoding_tokens\tdataset\twer_pct\n")
            for line in evaluate.results_lines(records):
                rec = json.loads(line)
                fh.write(
                    f"{rec['experiment']}\t{evaluate.format_tokens(rec['decoding_tokens'])}"
                    f"\t{rec['dataset']}\t{rec['wer_pct']}\n"
                )
        chart = figures.render_results_chart(records, report_dir / "wer_bars.png")
        click.echo(f"report -> {tsv_path}, chart -> {chart}")


def _default_log_path(candidates_path: str) -> Path:
    return Path(candidates_path).with_suffix(Path(candidates_path).suffix + ".decisions")


@cli.command("review-serve")
@click.option("--candidates", "candidates_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--log", "log_path", type=click.Path(dir_okay=False), default=None,
              help="Decision log; defaults to <candidates>.decisions.")
@click.option("--audio-root", type=click.Path(exists=True, file_okay=False), default=None)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Directory of static review-UI assets.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=None,
              help=f"Defaults to ${review.PORT_ENV_VAR} or {review.DEFAULT_PORT}.")
@pipeline_errors
def cmd_review_serve(candidates_path, log_path, audio_root, ui_dir, host, port):
    """Serve the manual-review API (and UI) over a candidate file."""
    log_path = Path(log_path) if log_path else _default_log_path(candidates_path)
    store = review.ReviewStore.load(candidates_path, log_path)
    stats = store.stats()
    click.echo(
        f"{stats['total']} candidates ({stats['status']['pending']} pending), "
        f"log at {log_path}"
    )
    review.serve(store, audio_root=audio_root, ui_dir=ui_dir, host=host, port=port)


@cli.command("export")
@click.option("--candidates", "candidates_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--log", "log_path", type=click.Path(dir_okay=False), default=None,
              help="Decision log; defaults to <candidates>.decisions.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--source-name", default="accepted", show_default=True)
@pipeline_errors
def cmd_export(candidates_path, log_path, out_path, source_name):
    """Write the accepted candidates as an evaluation-ready manifest."""
    log_path = Path(log_path) if log_path else _default_log_path(candidates_path)
    store = review.ReviewStore.load(candidates_path, log_path)
    manifest = review.export_accepted(store, source_name=source_name)
    save_manifest(manifest, out_path)
    click.echo(f"{len(manifest)} accepted utterances -> {out_path}")


main = cli


if __name__ == "__main__":
    main()
