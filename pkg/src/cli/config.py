"""Experiment configuration for the cmtra CLI.

An experiment is described by one YAML or JSON file (JSON is read as YAML) whose
sections mirror the library configs. Command-line flags override individual fields.
"""

import json
from enum import StrEnum
from pathlib import Path
from typing import Any

import yaml  # type: ignore[import-untyped]
from pydantic import BaseModel, Field, ValidationError, model_validator

from src.corpus.labels import Language
from src.errors import ConfigError
from src.model.config import ModelConfig, TrainConfig
from src.pseudo.labeling import PseudoLabelConfig
from src.utils.digest import hash_text

DEFAULT_OUT_DIR = Path("runs") / "experiment"
DEFAULT_MODEL_TAG = "transformer-bilstm"


class Variant(StrEnum):
    """Which training set the final model sees."""

    CM = "cm"
    TRA = "tra"
    CMTRA = "cmtra"


class DataPaths(BaseModel):
    """Corpus files of one language."""

    train: Path | None = Field(default=None, description="Labeled training split (TSV)")
    dev: Path | None = Field(default=None, description="Optional labeled dev split")
    test: Path | None = Field(default=None, description="Labeled code-mixed test split")


class ExperimentConfig(BaseModel):
    """Everything a pipeline run needs."""

    language: Language = Field(default=Language.KANNADA, description="Corpus language")
    data: DataPaths = Field(default_factory=DataPaths)
    variant: Variant = Field(default=Variant.CMTRA, description="Training set: cm, tra or cmtra")
    model: ModelConfig = Field(default_factory=ModelConfig)
    train: TrainConfig = Field(default_factory=TrainConfig)
    pseudo: PseudoLabelConfig = Field(default_factory=PseudoLabelConfig)
    translit_table: Path | None = Field(
        default=None, description="Mapping table overriding the shipped one"
    )
    out: Path = Field(default=DEFAULT_OUT_DIR, description="Run directory")
    seed: int = Field(default=42, ge=0, description="Root seed for every random substream")
    model_tag: str = Field(
        default=DEFAULT_MODEL_TAG, min_length=1, description="Tag used in report file names"
    )
    debug_numerics: bool = Field(
        default=False, description="Assert finite values after every kernel"
    )

    @model_validator(mode="after")
    def _sync(self) -> "ExperimentConfig":
        # num_classes follows the language unless set explicitly
        if "num_classes" not in self.model.model_fields_set:
            self.model = self.model.model_copy(update={"num_classes": self.language.num_classes})
        elif self.model.num_classes != self.language.num_classes:
            raise ValueError(
                f"model.num_classes {self.model.num_classes} does not match the "
                f"{self.language.num_classes} {self.language.value} labels"
            )
        self.model = self.model.model_copy(update={"seed": self.seed})
        self.train = self.train.model_copy(update={"seed": self.seed})
        if self.pseudo.use_gold_labels and self.variant is not Variant.TRA:
            raise ValueError("pseudo.use_gold_labels applies to the tra variant only")
        return self

    def check_paths(self) -> None:
        """Raise ConfigError unless the train and test files exist."""
        for role in ("train", "test"):
            path = getattr(self.data, role)
            if path is None:
                raise ConfigError(
                    f"no {role} file configured",
                    detail=f"Set data.{role} in the config file or pass --{role}",
                )
            if not path.is_file():
                raise ConfigError(f"{role} file not found: {path}")
        if self.data.dev is not None and not self.data.dev.is_file():
            raise ConfigError(f"dev file not found: {self.data.dev}")
        if self.translit_table is not None and not self.translit_table.is_file():
            raise ConfigError(f"transliteration table not found: {self.translit_table}")

    def for_variant(self, variant: Variant) -> "ExperimentConfig":
        """This config retargeted at one variant, writing to ``out/<variant>``.

        ``pseudo.use_gold_labels`` is kept for tra and cleared for the others.
        """
        data = self.model_dump(mode="json")
        data["variant"] = variant.value
        data["out"] = str(self.out / variant.value)
        if variant is not Variant.TRA:
            data["pseudo"]["use_gold_labels"] = False
        return _validate(data, f"the {variant.value} variant")


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        parts.append(f"{location}: {item['msg']}")
    return "; ".join(parts)


def _read_raw(path: Path) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"config file {path} is not valid YAML or JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping at the top level")
    return data


def _validate(data: dict[str, Any], source: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration in {source}: {_validation_message(e)}") from e


def load_experiment_config(path: Path | str) -> ExperimentConfig:
    """Load an experiment config file.

    Raises:
        ConfigError: If the file is unreadable or any field is invalid
    """
    path = Path(path)
    return _validate(_read_raw(path), str(path))


def save_experiment_config(config: ExperimentConfig, path: Path | str) -> Path:
    """Write a config as JSON (``.json``) or YAML (anything else)."""
    path = Path(path)
    data = config.model_dump(mode="json")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        if path.suffix == ".json":
            json.dump(data, f, indent=2)
            f.write("\n")
        else:
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)
    return path


def get_effective_config(
    config_path: Path | str | None = None,
    language: str | None = None,
    variant: str | None = None,
    seed: int | None = None,
    epochs: int | None = None,
    batch_size: int | None = None,
    threshold: float | None = None,
    translit_table: Path | None = None,
    out: Path | None = None,
    train_path: Path | None = None,
    dev_path: Path | None = None,
    test_path: Path | None = None,
) -> ExperimentConfig:
    """Get effective config with command-line overrides applied.

    Overrides are merged into the raw file contents before validation, so derived
    fields (num_classes from the language, seeds) follow the overridden values.

    Args:
        config_path: Optional YAML/JSON config file; defaults are used without one
        language: Override language
        variant: Override dataset variant
        seed: Override root seed
        epochs: Override training epochs
        batch_size: Override batch size
        threshold: Override pseudo-label confidence threshold
        translit_table: Override transliteration table
        out: Override run directory
        train_path: Override training file
        dev_path: Override dev file
        test_path: Override test file

    Returns:
        Validated configuration

    Raises:
        ConfigError: If the file or any override is invalid
    """
    data = _read_raw(Path(config_path)) if config_path is not None else {}
    source = str(config_path) if config_path is not None else "command-line options"

    if language is not None:
        data["language"] = language
    if variant is not None:
        data["variant"] = variant
    if seed is not None:
        data["seed"] = seed
    if translit_table is not None:
        data["translit_table"] = str(translit_table)
    if out is not None:
        data["out"] = str(out)

    train_section = data.setdefault("train", {}) or {}
    if epochs is not None:
        train_section["epochs"] = epochs
    if batch_size is not None:
        train_section["batch_size"] = batch_size
    data["train"] = train_section

    if threshold is not None:
        pseudo_section = data.setdefault("pseudo", {}) or {}
        pseudo_section["threshold"] = threshold
        data["pseudo"] = pseudo_section

    data_section = data.setdefault("data", {}) or {}
    for key, value in (("train", train_path), ("dev", dev_path), ("test", test_path)):
        if value is not None:
            data_section[key] = str(value)
    data["data"] = data_section

    return _validate(data, source)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the config's canonical JSON form."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hash_text(canonical)
