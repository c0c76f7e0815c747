"""End-to-end experiment runs.

Stages by variant:

- cm: prepare, train, evaluate
- tra: prepare, transliterate, train_labeler, pseudo_label, train, evaluate
  (with ``pseudo.use_gold_labels`` the labeler stages are skipped)
- cmtra: prepare, transliterate, train_labeler, pseudo_label, build_cmtra, train, evaluate

Every variant is scored on the same code-mixed test split. A failing stage is
recorded in the manifest and re-raised as StageError. ``compare_variants`` runs
several variants from one config and writes a single comparison report.
"""

import logging
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from src.cli.config import ExperimentConfig, Variant
from src.cli.manifest import RunManifest
from src.corpus.dataset import Dataset, Split
from src.corpus.io import load_split, write_dataset
from src.corpus.stats import compare_with_published
from src.errors import ConfigError, DataError, IoError, StageError
from src.evaluation.metrics import MetricsReport, evaluate_predictions
from src.evaluation.report import write_comparison, write_report
from src.model.network import ClassifierModel
from src.model.persistence import save_model
from src.model.training import EpochRecord, History, train
from src.model.vocab import build_vocab
from src.nn.kernels import debug_checks
from src.pseudo.labeling import PseudoLabelRun, build_cm_tra, generate_pseudo_labels
from src.translit.engine import TransliterationStats, transliterate_dataset
from src.translit.mapping import load_mapping

logger = logging.getLogger(__name__)

CHECKPOINT_STEM = "checkpoint"
LABELER_STEM = "labeler"
HISTORY_NAME = "history.jsonl"
PSEUDO_RUN_NAME = "pseudo_label_run.json"
TRANSLITERATED_NAME = "transliterated_train.tsv"
PSEUDO_LABELED_NAME = "pseudo_labeled_train.tsv"
CMTRA_NAME = "cmtra_train.tsv"

StageCallback = Callable[[str], None]
EpochCallback = Callable[[EpochRecord], None]


@dataclass
class RunResult:
    """Outcome of a successful run.

    Attributes:
        run_dir: Directory holding every artifact
        manifest: The written manifest
        report: Test-split metrics of the final model
        history: Training history of the labeler (if any) and final model
        artifacts: Written files keyed by role
        pseudo_run: Pseudo-labeling record, when that stage ran
        translit_stats: Transliteration counters, when that stage ran
    """

    run_dir: Path
    manifest: RunManifest
    report: MetricsReport
    history: History
    artifacts: dict[str, Path] = field(default_factory=dict)
    pseudo_run: PseudoLabelRun | None = None
    translit_stats: TransliterationStats | None = None


class _StageTracker:
    """Records stage outcomes in the manifest and wraps failures."""

    def __init__(self, manifest: RunManifest, run_dir: Path, on_stage: StageCallback | None):
        self.manifest = manifest
        self.run_dir = run_dir
        self.on_stage = on_stage

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        record = self.manifest.start_stage(name)
        logger.info("Stage %s started", name)
        if self.on_stage is not None:
            self.on_stage(name)
        try:
            yield
        except StageError:
            raise
        except Exception as e:
            self.manifest.fail_stage(record, e)
            self.manifest.write(self.run_dir)
            logger.error("Stage %s failed: %s", name, e)
            raise StageError(name, e) from e
        self.manifest.finish_stage(record)


def _write_pseudo_run(run: PseudoLabelRun, path: Path) -> Path:
    try:
        path.write_text(run.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write pseudo-label record {path}: {e}") from e
    return path


def _fresh_model(cfg: ExperimentConfig, corpus_texts: list[str]) -> ClassifierModel:
    vocab = build_vocab(corpus_texts, min_freq=cfg.model.min_freq)
    return ClassifierModel.initialize(vocab, cfg.model, cfg.language)


def run_experiment(
    cfg: ExperimentConfig,
    on_stage: StageCallback | None = None,
    on_epoch: EpochCallback | None = None,
) -> RunResult:
    """Run one experiment and write its artifacts to ``cfg.out``.

    Args:
        cfg: Effective configuration
        on_stage: Called with each stage name as it starts
        on_epoch: Called with every epoch record of every trained model

    Returns:
        RunResult for the finished run

    Raises:
        ConfigError: If required input files are missing
        StageError: If any stage fails (the manifest is written first)
    """
    cfg.check_paths()
    run_dir = cfg.out
    run_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.create(cfg)
    tracker = _StageTracker(manifest, run_dir, on_stage)
    artifacts: dict[str, Path] = {}
    history = History()
    language = cfg.language
    pseudo_run: PseudoLabelRun | None = None
    translit_stats: TransliterationStats | None = None

    def keep(role: str, path: Path) -> None:
        artifacts[role] = path
        manifest.add_artifact(path, run_dir)

    with debug_checks(cfg.debug_numerics):
        with tracker.stage("prepare"):
            assert cfg.data.train is not None and cfg.data.test is not None
            manifest.add_input("train", cfg.data.train)
            manifest.add_input("test", cfg.data.test)
            cm_train = load_split(cfg.data.train, language, Split.TRAIN)
            test = load_split(cfg.data.test, language, Split.TEST)
            dev: Dataset | None = None
            if cfg.data.dev is not None:
                manifest.add_input("dev", cfg.data.dev)
                dev = load_split(cfg.data.dev, language, Split.DEV)
            if cfg.translit_table is not None:
                manifest.add_input("translit_table", cfg.translit_table)
            for dataset in (cm_train, test, dev):
                if dataset is not None:
                    compare_with_published(dataset)
            # fail before any training if labels are missing
            cm_train.labels()
            test.labels()

        labeler: ClassifierModel | None = None
        if cfg.variant is Variant.CM:
            final_train = cm_train
            vocab_texts = cm_train.texts()
        else:
            with tracker.stage("transliterate"):
                mapping = load_mapping(language, cfg.translit_table)
                transliterated, translit_stats = transliterate_dataset(cm_train, mapping)
                keep("transliterated", write_dataset(transliterated, run_dir / TRANSLITERATED_NAME, with_origin=True))
            vocab_texts = cm_train.texts() + transliterated.texts()

            if cfg.pseudo.use_gold_labels:
                logger.info("Using gold labels for the transliterated split")
                pseudo_labeled = transliterated
            else:
                with tracker.stage("train_labeler"):
                    labeler = _fresh_model(cfg, vocab_texts)
                    _, labeler_history = train(
                        labeler, cm_train, cfg.train, dev=dev, stage="labeler", progress=on_epoch
                    )
                    history.extend(labeler_history)
                    if cfg.pseudo.labeler == "separate":
                        labeler_bin, labeler_json = save_model(labeler, run_dir / LABELER_STEM)
                        keep("labeler_checkpoint", labeler_bin)
                        keep("labeler_checkpoint_manifest", labeler_json)

                with tracker.stage("pseudo_label"):
                    pseudo_labeled, pseudo_run = generate_pseudo_labels(
                        labeler,
                        transliterated,
                        threshold=cfg.pseudo.threshold,
                        source_model=f"{cfg.model_tag}-labeler",
                    )
                    keep("pseudo_run", _write_pseudo_run(pseudo_run, run_dir / PSEUDO_RUN_NAME))
                    keep(
                        "pseudo_labeled",
                        write_dataset(pseudo_labeled, run_dir / PSEUDO_LABELED_NAME, with_origin=True),
                    )

            if cfg.variant is Variant.CMTRA:
                with tracker.stage("build_cmtra"):
                    final_train = build_cm_tra(cm_train, pseudo_labeled, cfg.seed)
                    keep("cmtra", write_dataset(final_train, run_dir / CMTRA_NAME, with_origin=True))
            else:
                final_train = pseudo_labeled

        with tracker.stage("train"):
            if labeler is not None and cfg.pseudo.labeler == "shared":
                model = labeler
            else:
                model = _fresh_model(cfg, vocab_texts)
            _, final_history = train(model, final_train, cfg.train, dev=dev, stage="final", progress=on_epoch)
            history.extend(final_history)
            bin_path, json_path = save_model(model, run_dir / CHECKPOINT_STEM)
            keep("checkpoint", bin_path)
            keep("checkpoint_manifest", json_path)
            keep("history", history.write_jsonl(run_dir / HISTORY_NAME))

        with tracker.stage("evaluate"):
            probs = model.predict_proba(test.texts())
            predicted = [model.labels[int(i)] for i in np.argmax(probs, axis=1)]
            report = evaluate_predictions(test.labels(), predicted, language.labels)
            paths = write_report(report, run_dir, language.value, cfg.variant.value, cfg.model_tag)
            for role, path in paths.items():
                keep(f"report_{role}", path)

    manifest.write(run_dir)
    logger.info(
        "Run finished: %s %s accuracy %.4f, weighted F1 %.4f",
        language.value,
        cfg.variant.value,
        report.accuracy,
        report.weighted_f1,
    )
    return RunResult(
        run_dir=run_dir,
        manifest=manifest,
        report=report,
        history=history,
        artifacts=artifacts,
        pseudo_run=pseudo_run,
        translit_stats=translit_stats,
    )



def _prefixed(on_stage: StageCallback | None, prefix: str) -> StageCallback | None:
    if on_stage is None:
        return None
    callback = on_stage
    return lambda name: callback(f"{prefix}: {name}")

@dataclass
class ComparisonResult:
    """Outcome of a multi-variant comparison.

    Attributes:
        out_dir: Parent directory; each variant ran in ``out_dir/<variant>``
        runs: Per-variant results in run order
        test_digest: SHA-256 of the shared test split
        paths: Comparison report files keyed "text" and "json"
    """

    out_dir: Path
    runs: dict[Variant, RunResult]
    test_digest: str | None
    paths: dict[str, Path]


def compare_variants(
    cfg: ExperimentConfig,
    variants: Sequence[Variant] = tuple(Variant),
    on_stage: StageCallback | None = None,
    on_epoch: EpochCallback | None = None,
) -> ComparisonResult:
    """Run each variant from ``cfg`` and write one comparison table under ``cfg.out``.

    Raises:
        ConfigError: If no variants are given or required inputs are missing
        DataError: If the test split digest differs between runs
        StageError: If a stage of any run fails
    """
    if not variants:
        raise ConfigError("no variants to compare")
    runs: dict[Variant, RunResult] = {}
    for variant in dict.fromkeys(variants):
        logger.info("Comparison run %s", variant.value)
        runs[variant] = run_experiment(
            cfg.for_variant(variant), on_stage=_prefixed(on_stage, variant.value), on_epoch=on_epoch
        )

    digests = {result.manifest.digest_for("test") for result in runs.values()}
    if len(digests) != 1:
        raise DataError(
            "test split changed between variant runs",
            detail="Every variant must be scored on the same test file",
        )
    test_digest = digests.pop()
    paths = write_comparison(
        {variant.value: result.report for variant, result in runs.items()},
        cfg.out,
        cfg.language.value,
        cfg.model_tag,
        test_digest=test_digest,
    )
    return ComparisonResult(out_dir=cfg.out, runs=runs, test_digest=test_digest, paths=paths)
