"""cmtra CLI - Main entry point.

Command-line interface for offensive-language classification of code-mixed
Dravidian text with transliteration and pseudo-labeling. Each pipeline stage is a
subcommand; ``run`` composes them from a config file.
"""

from pathlib import Path
from typing import Annotated, NoReturn

import typer
from rich.console import Console

from src.cli import output
from src.cli.config import (
    DEFAULT_MODEL_TAG,
    ExperimentConfig,
    Variant,
    get_effective_config,
    save_experiment_config,
)
from src.cli.pipeline import compare_variants, run_experiment
from src.corpus.dataset import Split
from src.corpus.io import load_split, read_tagged, write_dataset
from src.corpus.labels import Language
from src.corpus.stats import describe
from src.errors import CmtraError, DataError, IoError
from src.evaluation.metrics import evaluate_predictions
from src.evaluation.report import report_record, write_report
from src.model.network import ClassifierModel
from src.model.persistence import load_model, save_model
from src.model.training import EpochRecord, predict, train
from src.model.vocab import build_vocab
from src.pseudo.labeling import build_cm_tra, generate_pseudo_labels
from src.translit.engine import transliterate_dataset, transliterate_text
from src.translit.mapping import load_mapping
from src.version import __version__

# Main app
app = typer.Typer(
    name="cmtra",
    help="Offensive-language classification of code-mixed Dravidian text.",
    no_args_is_help=True,
    rich_markup_mode="rich",
)

# Config subcommand group
config_app = typer.Typer(
    name="config",
    help="Inspect and create experiment configs.",
    no_args_is_help=True,
)
app.add_typer(config_app, name="config")

console = Console()

# Common options as type aliases
LanguageOption = Annotated[
    Language,
    typer.Option("--language", "-l", help="Corpus language", case_sensitive=False),
]

ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", "-c", help="Experiment config file (YAML or JSON)"),
]

SeedOption = Annotated[
    int | None,
    typer.Option("--seed", help="Root seed for all random substreams"),
]

EpochsOption = Annotated[
    int | None,
    typer.Option("--epochs", help="Training epochs (default: 5)"),
]

BatchSizeOption = Annotated[
    int | None,
    typer.Option("--batch-size", help="Training batch size (default: 16)"),
]

ThresholdOption = Annotated[
    float | None,
    typer.Option("--threshold", help="Drop pseudo-labels below this top probability"),
]

TranslitTableOption = Annotated[
    Path | None,
    typer.Option("--translit-table", help="Mapping table overriding the shipped one"),
]

OutputFormatOption = Annotated[
    str,
    typer.Option(
        "--output",
        "-o",
        help="Output format: 'text' (human-readable) or 'json' (machine-readable)",
    ),
]

VerboseOption = Annotated[
    bool,
    typer.Option(
        "--verbose",
        "-v",
        help="Show debug logs",
    ),
]


def _fail(error: CmtraError) -> NoReturn:
    output.print_error(str(error), hint=error.detail)
    raise typer.Exit(error.exit_code)


def _check_format(output_format: str) -> None:
    if output_format not in ("text", "json"):
        output.print_error(f"Invalid output format: {output_format}", hint="Use 'text' or 'json'")
        raise typer.Exit(1)


def _epoch_message(record: EpochRecord) -> str:
    message = f"{record.stage} epoch {record.epoch}: loss {record.train_loss:.4f}, acc {record.train_acc:.4f}"
    if record.dev_macro_f1 is not None:
        message += f", dev macro F1 {record.dev_macro_f1:.4f}"
    return message


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        console.print(f"cmtra version {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-V",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit",
        ),
    ] = False,
    verbose: VerboseOption = False,
) -> None:
    """cmtra - code-mixed + transliterated offensive-language classification.

    Train on code-mixed comments, transliterate them to native script, pseudo-label
    the transliterations and train again on the fused CM-TRA set.

    Get started:
        cmtra prepare data/kannada_train.tsv -l kannada
        cmtra run -c experiment.yaml --variant cmtra
    """
    output.setup_logging(verbose)


@app.command()
def prepare(
    path: Annotated[Path, typer.Argument(help="Corpus TSV file")],
    language: LanguageOption,
    split: Annotated[
        Split, typer.Option("--split", "-s", help="Split tag", case_sensitive=False)
    ] = Split.TRAIN,
    unlabeled: Annotated[
        bool, typer.Option("--unlabeled", help="Records carry no label field")
    ] = False,
    check_published: Annotated[
        bool,
        typer.Option(
            "--check-published/--no-check-published",
            help="Compare sizes and class counts with the published figures",
        ),
    ] = True,
    output_format: OutputFormatOption = "text",
) -> None:
    """Load a corpus split and show its class distribution.

    Examples:
        cmtra prepare kannada_train.tsv -l kannada
        cmtra prepare kannada_test.tsv -l kannada -s test -o json
    """
    _check_format(output_format)
    try:
        dataset = load_split(path, language, split, labeled=not unlabeled)
        summary = describe(dataset, check_published=check_published)
    except CmtraError as e:
        _fail(e)

    if output_format == "json":
        output.print_json(
            {
                "language": summary.language.value,
                "split": summary.split.value,
                "size": summary.size,
                "distribution": {label.code: count for label, count in summary.distribution.items()},
                "discrepancies": [str(d) for d in summary.discrepancies],
            }
        )
    else:
        output.print_distribution(summary)


@app.command()
def transliterate(
    language: LanguageOption,
    path: Annotated[
        Path | None, typer.Argument(help="Corpus TSV file to transliterate")
    ] = None,
    out: Annotated[
        Path | None, typer.Option("--out", help="Write the tagged TSV here")
    ] = None,
    text: Annotated[
        str | None, typer.Option("--text", "-t", help="Transliterate one string instead of a file")
    ] = None,
    unlabeled: Annotated[
        bool, typer.Option("--unlabeled", help="Records carry no label field")
    ] = False,
    translit_table: TranslitTableOption = None,
) -> None:
    """Convert romanized spans to native script.

    Examples:
        cmtra transliterate -l tamil --text "padam super"
        cmtra transliterate -l kannada kannada_train.tsv --out kannada_tra.tsv
    """
    if (text is None) == (path is None):
        output.print_error("Give either a corpus file or --text")
        raise typer.Exit(1)
    try:
        mapping = load_mapping(language, translit_table)
        if text is not None:
            print(transliterate_text(text, language, mapping))
            return
        assert path is not None
        if out is None:
            output.print_error("--out is required when transliterating a file")
            raise typer.Exit(1)
        dataset = load_split(path, language, Split.TRAIN, labeled=not unlabeled)
        transliterated, stats = transliterate_dataset(dataset, mapping)
        write_dataset(transliterated, out, with_origin=True)
    except CmtraError as e:
        _fail(e)

    output.print_translit_stats(stats)
    output.print_success(f"Wrote {len(transliterated)} transliterated samples to {out}")


@app.command("train")
def train_command(
    train_path: Annotated[Path, typer.Argument(help="Labeled training TSV")],
    language: LanguageOption,
    out: Annotated[Path, typer.Option("--out", help="Directory for checkpoint and history")],
    dev: Annotated[Path | None, typer.Option("--dev", help="Labeled dev TSV")] = None,
    tagged: Annotated[
        bool,
        typer.Option("--tagged", help="Training file is a three-column tagged TSV (e.g. CM-TRA)"),
    ] = False,
    vocab_from: Annotated[
        list[Path] | None,
        typer.Option("--vocab-from", help="Extra tagged TSVs whose text joins the vocabulary"),
    ] = None,
    config_path: ConfigOption = None,
    epochs: EpochsOption = None,
    batch_size: BatchSizeOption = None,
    seed: SeedOption = None,
) -> None:
    """Train a classifier and save its checkpoint.

    Examples:
        cmtra train kannada_train.tsv -l kannada --out runs/cm --vocab-from kannada_tra.tsv
        cmtra train runs/cmtra_train.tsv -l kannada --tagged --out runs/cmtra
    """
    try:
        cfg = get_effective_config(
            config_path, language=language.value, epochs=epochs, batch_size=batch_size, seed=seed
        )
        if tagged:
            data = read_tagged(train_path, language, Split.TRAIN)
        else:
            data = load_split(train_path, language, Split.TRAIN)
        dev_data = load_split(dev, language, Split.DEV) if dev is not None else None
        texts = data.texts()
        for extra in vocab_from or []:
            texts += read_tagged(extra, language).texts()
        vocab = build_vocab(texts, min_freq=cfg.model.min_freq)
        model = ClassifierModel.initialize(vocab, cfg.model, language)
        with output.stage_status("Training") as status:
            _, history = train(
                model,
                data,
                cfg.train,
                dev=dev_data,
                progress=lambda record: status.update(f"[dim]{_epoch_message(record)}[/]"),
            )
        out.mkdir(parents=True, exist_ok=True)
        bin_path, _ = save_model(model, out / "checkpoint")
        history.write_jsonl(out / "history.jsonl")
    except CmtraError as e:
        _fail(e)

    output.print_history(history)
    output.print_success(f"Saved checkpoint {bin_path}")


@app.command("pseudo-label")
def pseudo_label(
    checkpoint: Annotated[Path, typer.Argument(help="Checkpoint stem or .bin/.json path")],
    path: Annotated[Path, typer.Argument(help="Tagged TSV from 'cmtra transliterate'")],
    out: Annotated[Path, typer.Option("--out", help="Pseudo-labeled tagged TSV")],
    threshold: ThresholdOption = None,
) -> None:
    """Label transliterated samples with a trained model.

    Writes the labeled TSV plus a ``<out>.run.json`` record.

    Examples:
        cmtra pseudo-label runs/cm/checkpoint kannada_tra.tsv --out kannada_pseudo.tsv
    """
    try:
        model = load_model(checkpoint)
        if model.language is None:
            raise DataError("checkpoint has no language, so it cannot label data")
        transliterated = read_tagged(path, model.language)
        labeled, run = generate_pseudo_labels(model, transliterated, threshold, source_model=str(checkpoint))
        write_dataset(labeled, out, with_origin=True)
        run_path = out.with_suffix(".run.json")
        try:
            run_path.write_text(run.model_dump_json(indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write {run_path}: {e}") from e
    except CmtraError as e:
        _fail(e)

    output.print_json(run.model_dump(mode="json"))
    output.print_success(f"Pseudo-labeled {run.labeled} of {run.input_size} samples into {out}")


@app.command("build-cmtra")
def build_cmtra(
    cm_train: Annotated[Path, typer.Argument(help="Gold code-mixed training TSV")],
    pseudo_path: Annotated[Path, typer.Argument(help="Pseudo-labeled tagged TSV")],
    language: LanguageOption,
    out: Annotated[Path, typer.Option("--out", help="CM-TRA tagged TSV")],
    seed: Annotated[int, typer.Option("--seed", help="Shuffle seed")] = 42,
) -> None:
    """Merge gold code-mixed and pseudo-labeled data into CM-TRA.

    Examples:
        cmtra build-cmtra kannada_train.tsv kannada_pseudo.tsv -l kannada --out cmtra.tsv
    """
    try:
        cm = load_split(cm_train, language, Split.TRAIN)
        pseudo = read_tagged(pseudo_path, language)
        merged = build_cm_tra(cm, pseudo, seed)
        write_dataset(merged, out, with_origin=True)
    except CmtraError as e:
        _fail(e)

    output.print_success(f"Wrote {len(merged)} CM-TRA samples to {out}")


@app.command()
def evaluate(
    checkpoint: Annotated[Path, typer.Argument(help="Checkpoint stem or .bin/.json path")],
    test_path: Annotated[Path, typer.Argument(help="Labeled code-mixed test TSV")],
    out: Annotated[
        Path | None, typer.Option("--out", help="Directory for report and heatmap files")
    ] = None,
    variant: Annotated[
        Variant, typer.Option("--variant", help="Variant tag used in file names")
    ] = Variant.CMTRA,
    model_tag: Annotated[
        str, typer.Option("--tag", help="Model tag used in file names")
    ] = DEFAULT_MODEL_TAG,
    output_format: OutputFormatOption = "text",
) -> None:
    """Score a checkpoint on a labeled split.

    Examples:
        cmtra evaluate runs/cmtra/checkpoint kannada_test.tsv
        cmtra evaluate runs/cmtra/checkpoint kannada_test.tsv --out reports -o json
    """
    _check_format(output_format)
    try:
        model = load_model(checkpoint)
        if model.language is None:
            raise DataError("checkpoint has no language, so it cannot be scored")
        test = load_split(test_path, model.language, Split.TEST)
        gold = test.labels()
        predicted = [label for label, _ in predict(model, test.texts())]
        report = evaluate_predictions(gold, predicted, model.language.labels)
        if out is not None:
            write_report(report, out, model.language.value, variant.value, model_tag)
    except CmtraError as e:
        _fail(e)

    if output_format == "json":
        output.print_json(report_record(report))
    else:
        output.print_report(report)
        output.print_heatmap(report.confusion)
    if out is not None:
        output.print_info(f"Report files written to {out}")


@app.command("predict")
def predict_command(
    checkpoint: Annotated[Path, typer.Argument(help="Checkpoint stem or .bin/.json path")],
    texts: Annotated[list[str] | None, typer.Argument(help="Texts to classify")] = None,
    file: Annotated[
        Path | None, typer.Option("--file", "-f", help="Unlabeled TSV/plain file, one text per line")
    ] = None,
    output_format: OutputFormatOption = "text",
) -> None:
    """Print the predicted label of each text.

    Examples:
        cmtra predict runs/cmtra/checkpoint "super padam"
        cmtra predict runs/cmtra/checkpoint -f comments.txt -o json
    """
    _check_format(output_format)
    try:
        model = load_model(checkpoint)
        if model.language is None:
            raise DataError("checkpoint has no language, so it cannot emit labels")
        inputs = list(texts or [])
        if file is not None:
            inputs += load_split(file, model.language, Split.UNSPLIT, labeled=False).texts()
        if not inputs:
            output.print_error("No texts given", hint="Pass texts as arguments or use --file")
            raise typer.Exit(1)
        predictions = predict(model, inputs)
    except CmtraError as e:
        _fail(e)

    output.print_predictions(inputs, predictions, output_format)


@app.command()
def run(
    config_path: ConfigOption = None,
    language: Annotated[
        Language | None,
        typer.Option("--language", "-l", help="Corpus language", case_sensitive=False),
    ] = None,
    variant: Annotated[
        Variant | None, typer.Option("--variant", help="Training set: cm, tra or cmtra")
    ] = None,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    batch_size: BatchSizeOption = None,
    threshold: ThresholdOption = None,
    translit_table: TranslitTableOption = None,
    out: Annotated[Path | None, typer.Option("--out", help="Run directory")] = None,
    train_path: Annotated[Path | None, typer.Option("--train", help="Training TSV")] = None,
    dev_path: Annotated[Path | None, typer.Option("--dev", help="Dev TSV")] = None,
    test_path: Annotated[Path | None, typer.Option("--test", help="Test TSV")] = None,
    output_format: OutputFormatOption = "text",
) -> None:
    """Run the whole pipeline for one variant and write every artifact.

    Examples:
        cmtra run -c experiment.yaml
        cmtra run -l tamil --variant cm --train ta_train.tsv --test ta_test.tsv --out runs/ta_cm
    """
    _check_format(output_format)
    try:
        cfg = get_effective_config(
            config_path,
            language=language.value if language is not None else None,
            variant=variant.value if variant is not None else None,
            seed=seed,
            epochs=epochs,
            batch_size=batch_size,
            threshold=threshold,
            translit_table=translit_table,
            out=out,
            train_path=train_path,
            dev_path=dev_path,
            test_path=test_path,
        )
        if output.is_piped():
            result = run_experiment(
                cfg,
                on_stage=output.print_progress,
                on_epoch=lambda record: output.print_info(_epoch_message(record)),
            )
        else:
            with output.stage_status("Starting run") as status:
                result = run_experiment(
                    cfg,
                    on_stage=lambda name: status.update(f"[dim]{name}...[/]"),
                    on_epoch=lambda record: status.update(f"[dim]{_epoch_message(record)}[/]"),
                )
    except CmtraError as e:
        _fail(e)

    if output_format == "json":
        output.print_json(
            {
                "run_dir": str(result.run_dir),
                "config_hash": result.manifest.config_hash,
                "artifacts": result.manifest.artifacts,
                "report": report_record(result.report),
            }
        )
        return
    output.print_history(result.history)
    output.print_report(result.report, title=f"{cfg.language.value} / {cfg.variant.value} test report")
    output.print_heatmap(result.report.confusion)
    output.print_success(f"Run written to {result.run_dir}")


@app.command()
def compare(
    config_path: ConfigOption = None,
    language: Annotated[
        Language | None,
        typer.Option("--language", "-l", help="Corpus language", case_sensitive=False),
    ] = None,
    variants: Annotated[
        list[Variant] | None,
        typer.Option("--variant", help="Variant to include (repeatable; default: cm, tra and cmtra)"),
    ] = None,
    seed: SeedOption = None,
    epochs: EpochsOption = None,
    batch_size: BatchSizeOption = None,
    threshold: ThresholdOption = None,
    out: Annotated[Path | None, typer.Option("--out", help="Parent directory of the variant runs")] = None,
    train_path: Annotated[Path | None, typer.Option("--train", help="Training TSV")] = None,
    dev_path: Annotated[Path | None, typer.Option("--dev", help="Dev TSV")] = None,
    test_path: Annotated[Path | None, typer.Option("--test", help="Test TSV")] = None,
    output_format: OutputFormatOption = "text",
) -> None:
    """Run several variants on the same splits and write one comparison table.

    Each variant runs in ``<out>/<variant>``; the table lands in ``<out>``.

    Examples:
        cmtra compare -c experiment.yaml
        cmtra compare -c experiment.yaml --variant cm --variant cmtra --out runs/kn
    """
    _check_format(output_format)
    try:
        cfg = get_effective_config(
            config_path,
            language=language.value if language is not None else None,
            seed=seed,
            epochs=epochs,
            batch_size=batch_size,
            threshold=threshold,
            out=out,
            train_path=train_path,
            dev_path=dev_path,
            test_path=test_path,
        )
        selected = tuple(variants) if variants else tuple(Variant)
        if output.is_piped():
            result = compare_variants(cfg, selected, on_stage=output.print_progress)
        else:
            with output.stage_status("Starting comparison") as status:
                result = compare_variants(
                    cfg, selected, on_stage=lambda name: status.update(f"[dim]{name}...[/]")
                )
    except CmtraError as e:
        _fail(e)

    reports = {variant.value: run.report for variant, run in result.runs.items()}
    if output_format == "json":
        output.print_json(
            {
                "out_dir": str(result.out_dir),
                "test_digest": result.test_digest,
                "comparison": {role: str(path) for role, path in result.paths.items()},
                "runs": {variant.value: str(run.run_dir) for variant, run in result.runs.items()},
                "reports": {name: report_record(report) for name, report in reports.items()},
            }
        )
        return
    output.print_comparison(reports, title=f"{cfg.language.value} variant comparison")
    output.print_success(f"Comparison written to {result.paths['text']}")


@config_app.command("show")
def config_show(config_path: ConfigOption = None) -> None:
    """Show the effective configuration."""
    try:
        cfg = get_effective_config(config_path)
    except CmtraError as e:
        _fail(e)
    output.print_config(cfg.model_dump(mode="json"))


@config_app.command("init")
def config_init(
    path: Annotated[Path, typer.Argument(help="Where to write the config (.yaml or .json)")],
    language: LanguageOption = Language.KANNADA,
    force: Annotated[bool, typer.Option("--force", help="Overwrite an existing file")] = False,
) -> None:
    """Write a default experiment config to edit.

    Examples:
        cmtra config init experiment.yaml -l malayalam
    """
    if path.exists() and not force:
        output.print_error(f"{path} already exists", hint="Use --force to overwrite")
        raise typer.Exit(1)
    save_experiment_config(ExperimentConfig(language=language), path)
    output.print_success(f"Wrote default config to {path}")


def cli() -> None:
    """Entry point for CLI."""
    app()


if __name__ == "__main__":
    cli()
