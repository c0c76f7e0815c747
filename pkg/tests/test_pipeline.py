"""Tests for pipeline runs called directly: pseudo-label branches and variant comparisons."""

import json
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from src.cli.config import ExperimentConfig, Variant
from src.cli.manifest import MANIFEST_NAME, load_manifest
from src.cli.pipeline import (
    LABELER_STEM,
    PSEUDO_LABELED_NAME,
    compare_variants,
    run_experiment,
)
from src.errors import ConfigError, DataError
from src.nn.kernels import debug_checks, debug_checks_enabled

TINY_MODEL = {
    "d_model": 8,
    "num_heads": 2,
    "num_layers": 1,
    "d_ff": 16,
    "lstm_hidden": 4,
    "max_len": 8,
    "dropout": 0.0,
}


def _config(out: Path, corpus: dict[str, Path], **extra: object) -> ExperimentConfig:
    data = {
        "language": "kannada",
        "data": {"train": str(corpus["train"]), "test": str(corpus["test"])},
        "model": TINY_MODEL,
        "train": {"epochs": 1, "batch_size": 8},
        "out": str(out),
    }
    data.update(extra)
    return ExperimentConfig.model_validate(data)


def _data_rows(path: Path) -> list[str]:
    lines = path.read_text(encoding="utf-8").splitlines()
    return [line for line in lines if line and not line.startswith("text\t")]


@pytest.mark.slow
class TestPseudoLabelBranches:
    """End-to-end runs through the labeler and pseudo-label stages."""

    def test_tra_with_generated_labels(self, tmp_path, toy_corpus):
        """Test the tra variant labels every transliterated sample and trains on them."""
        result = run_experiment(_config(tmp_path / "run", toy_corpus, variant="tra"))
        stages = [stage.name for stage in result.manifest.stages]
        assert stages == ["prepare", "transliterate", "train_labeler", "pseudo_label", "train", "evaluate"]

        assert result.pseudo_run is not None
        assert result.pseudo_run.input_size == 50
        assert result.pseudo_run.labeled == 50
        assert result.pseudo_run.skipped_below_threshold == 0
        assert sum(result.pseudo_run.histogram.values()) == 50
        assert len(_data_rows(result.run_dir / PSEUDO_LABELED_NAME)) == 50
        assert not (result.run_dir / "cmtra_train.tsv").exists()
        assert result.report.total == 20

    def test_separate_labeler(self, tmp_path, toy_corpus):
        """Test a separate labeler is saved and differs from the final classifier."""
        cfg = _config(tmp_path / "run", toy_corpus, variant="cmtra", pseudo={"labeler": "separate"})
        result = run_experiment(cfg)
        labeler_bin = result.run_dir / f"{LABELER_STEM}.bin"
        assert labeler_bin.is_file()
        assert result.artifacts["labeler_checkpoint"] == labeler_bin
        assert labeler_bin.read_bytes() != (result.run_dir / "checkpoint.bin").read_bytes()
        assert f"{LABELER_STEM}.bin" in result.manifest.artifacts

    def test_shared_labeler_writes_one_checkpoint(self, tmp_path, toy_corpus):
        """Test the shared labeler is the final model, so no labeler checkpoint is written."""
        result = run_experiment(_config(tmp_path / "run", toy_corpus, variant="cmtra"))
        assert not (result.run_dir / f"{LABELER_STEM}.bin").exists()
        assert "labeler_checkpoint" not in result.artifacts

    def test_debug_setting_restored_after_run(self, tmp_path, toy_corpus):
        """Test a run leaves the caller's finite-value checking in place."""
        cfg = _config(tmp_path / "run", toy_corpus, variant="cm", debug_numerics=False)
        with debug_checks(True):
            run_experiment(cfg)
            assert debug_checks_enabled()
        assert not debug_checks_enabled()


@pytest.mark.slow
class TestCompareVariants:
    """End-to-end comparison of all three variants."""

    def test_all_variants_share_test_split(self, tmp_path, toy_corpus):
        """Test every variant run records the same test digest and lands in one table."""
        out = tmp_path / "grid"
        result = compare_variants(_config(out, toy_corpus))
        assert list(result.runs) == [Variant.CM, Variant.TRA, Variant.CMTRA]

        digests = set()
        for variant in Variant:
            manifest = load_manifest(out / variant.value / MANIFEST_NAME)
            assert manifest.config["variant"] == variant.value
            digests.add(manifest.digest_for("test"))
        assert digests == {result.test_digest}
        assert result.test_digest is not None

        record = json.loads(result.paths["json"].read_text(encoding="utf-8"))
        assert record["test_digest"] == result.test_digest
        assert list(record["variants"]) == ["cm", "tra", "cmtra"]
        for variant_record in record["variants"].values():
            assert variant_record["total"] == 20
        table = result.paths["text"].read_text(encoding="utf-8").splitlines()
        assert [line.split()[0] for line in table[1:]] == ["cm", "tra", "cmtra"]
        assert result.paths["text"].name == "comparison_kannada_transformer-bilstm.txt"


class TestCompareChecks:
    """Tests for comparison checks that need no training."""

    def test_no_variants(self, tmp_path, toy_corpus):
        """Test an empty variant list is a config error."""
        with pytest.raises(ConfigError, match="no variants"):
            compare_variants(_config(tmp_path / "grid", toy_corpus), variants=())

    def test_test_digest_mismatch(self, tmp_path, toy_corpus):
        """Test runs scored on different test files are refused."""

        def fake_run(cfg, on_stage=None, on_epoch=None):
            run = MagicMock()
            run.manifest.digest_for.return_value = f"digest-{cfg.variant.value}"
            return run

        with (
            patch("src.cli.pipeline.run_experiment", side_effect=fake_run),
            pytest.raises(DataError, match="test split changed"),
        ):
            compare_variants(_config(tmp_path / "grid", toy_corpus), variants=(Variant.CM, Variant.CMTRA))

    def test_variants_run_in_own_directories(self, tmp_path, toy_corpus):
        """Test each variant gets its own run directory and duplicates run once."""
        seen = []

        def fake_run(cfg, on_stage=None, on_epoch=None):
            seen.append((cfg.variant, cfg.out))
            run = MagicMock()
            run.manifest.digest_for.return_value = "same"
            return run

        out = tmp_path / "grid"
        with (
            patch("src.cli.pipeline.run_experiment", side_effect=fake_run),
            patch("src.cli.pipeline.write_comparison", return_value={}) as write,
        ):
            result = compare_variants(
                _config(out, toy_corpus), variants=(Variant.TRA, Variant.CM, Variant.TRA)
            )
        assert seen == [(Variant.TRA, out / "tra"), (Variant.CM, out / "cm")]
        assert result.test_digest == "same"
        assert list(write.call_args.args[0]) == ["tra", "cm"]
