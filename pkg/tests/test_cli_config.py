"""Tests for experiment configuration loading and overrides."""

import json

import pytest
import yaml

from src.cli.config import (
    DEFAULT_OUT_DIR,
    ExperimentConfig,
    Variant,
    config_hash,
    get_effective_config,
    load_experiment_config,
    save_experiment_config,
)
from src.corpus.labels import Language
from src.errors import ConfigError


class TestExperimentConfig:
    """Tests for ExperimentConfig defaults and cross-field rules."""

    def test_defaults(self):
        """Test the published settings are the defaults."""
        cfg = ExperimentConfig()
        assert cfg.language is Language.KANNADA
        assert cfg.variant is Variant.CMTRA
        assert cfg.seed == 42
        assert cfg.out == DEFAULT_OUT_DIR
        assert cfg.train.epochs == 5
        assert cfg.train.batch_size == 16
        assert cfg.model.num_classes == 6

    def test_num_classes_follows_language(self):
        """Test Malayalam configs get five output classes."""
        assert ExperimentConfig(language=Language.MALAYALAM).model.num_classes == 5

    def test_seed_propagates(self):
        """Test the root seed reaches the model and training sections."""
        cfg = ExperimentConfig(seed=7)
        assert cfg.model.seed == 7
        assert cfg.train.seed == 7

    def test_mismatched_num_classes(self):
        """Test an explicit class count must match the language."""
        with pytest.raises(ValueError, match="does not match"):
            ExperimentConfig.model_validate({"language": "malayalam", "model": {"num_classes": 6}})

    def test_gold_labels_only_for_tra(self):
        """Test gold-label transliteration is a tra-only option."""
        cfg = ExperimentConfig.model_validate({"variant": "tra", "pseudo": {"use_gold_labels": True}})
        assert cfg.pseudo.use_gold_labels
        with pytest.raises(ValueError, match="tra variant only"):
            ExperimentConfig.model_validate({"variant": "cmtra", "pseudo": {"use_gold_labels": True}})


    def test_for_variant(self, tmp_path):
        """Test retargeting writes to out/<variant> and keeps every other field."""
        cfg = ExperimentConfig(seed=5, out=tmp_path)
        cm = cfg.for_variant(Variant.CM)
        assert cm.variant is Variant.CM
        assert cm.out == tmp_path / "cm"
        assert cm.seed == 5 and cm.train.seed == 5
        assert cm.model.model_dump() == cfg.model.model_dump()

    def test_for_variant_gold_labels(self):
        """Test gold-label configs keep the option for tra and drop it elsewhere."""
        cfg = ExperimentConfig.model_validate({"variant": "tra", "pseudo": {"use_gold_labels": True}})
        assert cfg.for_variant(Variant.TRA).pseudo.use_gold_labels
        assert not cfg.for_variant(Variant.CMTRA).pseudo.use_gold_labels

class TestLoadSave:
    """Tests for reading and writing config files."""

    def test_yaml_round_trip(self, tmp_path):
        """Test a saved YAML config loads back equal."""
        cfg = ExperimentConfig(language=Language.TAMIL, variant=Variant.CM, seed=3)
        path = save_experiment_config(cfg, tmp_path / "exp.yaml")
        assert yaml.safe_load(path.read_text())["language"] == "tamil"
        assert load_experiment_config(path) == cfg

    def test_json_file(self, tmp_path):
        """Test .json paths are written as JSON and read back."""
        cfg = ExperimentConfig(language=Language.MALAYALAM)
        path = save_experiment_config(cfg, tmp_path / "nested" / "exp.json")
        assert json.loads(path.read_text())["model"]["num_classes"] == 5
        assert load_experiment_config(path).language is Language.MALAYALAM

    def test_empty_file_gives_defaults(self, tmp_path):
        """Test an empty file is the default config."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_experiment_config(path) == ExperimentConfig()

    def test_missing_file(self, tmp_path):
        """Test a missing file is a ConfigError."""
        with pytest.raises(ConfigError, match="cannot read"):
            load_experiment_config(tmp_path / "missing.yaml")

    def test_invalid_yaml(self, tmp_path):
        """Test unparseable content is a ConfigError."""
        path = tmp_path / "bad.yaml"
        path.write_text("language: [kannada\n")
        with pytest.raises(ConfigError, match="not valid YAML"):
            load_experiment_config(path)

    def test_non_mapping(self, tmp_path):
        """Test a top-level list is rejected."""
        path = tmp_path / "list.yaml"
        path.write_text("- kannada\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_experiment_config(path)

    def test_invalid_field(self, tmp_path):
        """Test field errors name their location."""
        path = tmp_path / "exp.yaml"
        path.write_text("train:\n  epochs: 0\n")
        with pytest.raises(ConfigError, match="train.epochs") as exc_info:
            load_experiment_config(path)
        assert exc_info.value.exit_code == 1


class TestEffectiveConfig:
    """Tests for command-line overrides."""

    def test_no_file(self):
        """Test defaults are used without a config file."""
        assert get_effective_config() == ExperimentConfig()

    def test_overrides(self, tmp_path):
        """Test every override lands in its section."""
        cfg = get_effective_config(
            language="tamil",
            variant="cm",
            seed=9,
            epochs=2,
            batch_size=4,
            threshold=0.5,
            out=tmp_path / "run",
            train_path=tmp_path / "train.tsv",
            test_path=tmp_path / "test.tsv",
        )
        assert cfg.language is Language.TAMIL
        assert cfg.variant is Variant.CM
        assert cfg.train.epochs == 2 and cfg.train.batch_size == 4
        assert cfg.train.seed == 9
        assert cfg.pseudo.threshold == 0.5
        assert cfg.out == tmp_path / "run"
        assert cfg.data.train == tmp_path / "train.tsv"
        assert cfg.data.dev is None

    def test_overrides_beat_file(self, tmp_path):
        """Test flags win over file values and untouched fields survive."""
        path = tmp_path / "exp.yaml"
        path.write_text("language: kannada\ntrain:\n  epochs: 3\n  batch_size: 8\n")
        cfg = get_effective_config(path, language="malayalam", epochs=1)
        assert cfg.language is Language.MALAYALAM
        assert cfg.model.num_classes == 5
        assert cfg.train.epochs == 1
        assert cfg.train.batch_size == 8

    def test_null_sections(self, tmp_path):
        """Test empty sections in the file accept overrides."""
        path = tmp_path / "exp.yaml"
        path.write_text("train:\ndata:\n")
        cfg = get_effective_config(path, epochs=4, train_path=tmp_path / "t.tsv")
        assert cfg.train.epochs == 4
        assert cfg.data.train == tmp_path / "t.tsv"

    def test_invalid_override(self):
        """Test a bad override is reported against the command line."""
        with pytest.raises(ConfigError, match="command-line options"):
            get_effective_config(threshold=1.5)


class TestCheckPaths:
    """Tests for input file checks."""

    def test_unset_train(self):
        """Test a run without a training file is rejected with a hint."""
        with pytest.raises(ConfigError, match="no train file") as exc_info:
            ExperimentConfig().check_paths()
        assert "--train" in exc_info.value.detail

    def test_missing_files(self, toy_corpus, tmp_path):
        """Test each configured file must exist."""
        base = {"data": {"train": str(toy_corpus["train"]), "test": str(toy_corpus["test"])}}
        ExperimentConfig.model_validate(base).check_paths()

        missing_test = {"data": {"train": str(toy_corpus["train"]), "test": str(tmp_path / "x.tsv")}}
        with pytest.raises(ConfigError, match="test file not found"):
            ExperimentConfig.model_validate(missing_test).check_paths()

        missing_dev = {"data": {**base["data"], "dev": str(tmp_path / "dev.tsv")}}
        with pytest.raises(ConfigError, match="dev file not found"):
            ExperimentConfig.model_validate(missing_dev).check_paths()

        missing_table = {**base, "translit_table": str(tmp_path / "table.tsv")}
        with pytest.raises(ConfigError, match="transliteration table"):
            ExperimentConfig.model_validate(missing_table).check_paths()


class TestConfigHash:
    """Tests for the canonical config digest."""

    def test_stable(self):
        """Test equal configs hash equally and the hash is hex SHA-256."""
        digest = config_hash(ExperimentConfig(seed=1))
        assert digest == config_hash(ExperimentConfig(seed=1))
        assert len(digest) == 64
        int(digest, 16)

    def test_sensitive(self):
        """Test any field change changes the hash."""
        assert config_hash(ExperimentConfig(seed=1)) != config_hash(ExperimentConfig(seed=2))
