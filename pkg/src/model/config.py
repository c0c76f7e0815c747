"""Model and training configuration.

Defaults are the fine-tuning settings of the reference experiments: 5 epochs, batch size 16
(from the candidates 16/32/64), dropout 0.4, learning rate 2e-5, max length 128,
256 LSTM units, AdamW, cross-entropy loss. Encoder widths default to a desk-scale
shape; ``ModelConfig.large_shape()`` gives the large shape for shape-only checks.
"""

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.corpus.labels import Language
from src.errors import ConfigError
from src.nn.optim import OptimizerConfig, ScheduleConfig

BATCH_SIZE_CHOICES = (16, 32, 64)


class ModelConfig(BaseModel):
    """Classifier architecture."""

    d_model: int = Field(default=128, ge=2, description="Embedding and encoder width")
    num_heads: int = Field(default=4, ge=1, description="Attention heads per layer")
    num_layers: int = Field(default=2, ge=1, description="Encoder layers")
    d_ff: int = Field(default=256, ge=1, description="Feed-forward inner width")
    lstm_hidden: int = Field(default=256, ge=1, description="LSTM units per direction")
    dropout: float = Field(default=0.4, ge=0.0, lt=1.0, description="Dropout before the classifier")
    max_len: int = Field(default=128, ge=2, description="Token ids per sample, CLS included")
    num_classes: int = Field(default=6, ge=2, description="Output classes")
    use_bilstm_head: bool = Field(
        default=True, description="Run a BiLSTM over encoder states; else classify the CLS state"
    )
    min_freq: int = Field(default=1, ge=1, description="Vocabulary frequency threshold")
    dtype: Literal["float64", "float32"] = Field(default="float64", description="Parameter precision")
    seed: int = Field(default=42, ge=0, description="Initialization seed")

    @model_validator(mode="after")
    def _check_widths(self) -> "ModelConfig":
        if self.d_model % self.num_heads:
            raise ValueError(f"d_model {self.d_model} is not divisible by num_heads {self.num_heads}")
        if self.d_model % 2:
            raise ValueError(f"d_model must be even for positional encoding, got {self.d_model}")
        return self

    @property
    def np_dtype(self) -> np.dtype:
        return np.dtype(self.dtype)

    @classmethod
    def desk(cls, **overrides: Any) -> "ModelConfig":
        """Laptop-scale preset: d_model 128, 4 heads, 2 layers, d_ff 256."""
        return cls(**{"d_model": 128, "num_heads": 4, "num_layers": 2, "d_ff": 256, **overrides})

    @classmethod
    def large_shape(cls, **overrides: Any) -> "ModelConfig":
        """Large-model widths (1024 embedding, 16 heads); meant for shape checks."""
        return cls(**{"d_model": 1024, "num_heads": 16, "d_ff": 4096, **overrides})

    @classmethod
    def for_language(cls, language: Language, **overrides: Any) -> "ModelConfig":
        """Preset with num_classes set from the language's label set."""
        return cls(**{**overrides, "num_classes": language.num_classes})

    def check_language(self, language: Language) -> None:
        """Raise ConfigError unless num_classes matches the language's label set."""
        if self.num_classes != language.num_classes:
            raise ConfigError(
                f"num_classes {self.num_classes} does not match the {language.num_classes} "
                f"{language.value} labels",
                detail="Use ModelConfig.for_language() or set model.num_classes",
            )


class TrainConfig(BaseModel):
    """Training loop settings."""

    epochs: int = Field(default=5, ge=1, description="Passes over the training data")
    batch_size: int = Field(
        default=16, ge=1, description=f"Samples per step (published candidates: {BATCH_SIZE_CHOICES})"
    )
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    schedule: ScheduleConfig = Field(
        default_factory=ScheduleConfig,
        description="Learning-rate schedule; total_steps is filled in at train time",
    )
    seed: int = Field(default=42, ge=0, description="Shuffle and dropout seed")
    class_weighting: bool = Field(
        default=False, description="Weight the loss by inverse class frequency"
    )
    freeze_epochs_per_layer: int = Field(
        default=0,
        ge=0,
        description="Gradual unfreezing: epochs before each lower layer group starts training",
    )
    eval_batch_size: int = Field(default=64, ge=1, description="Batch size for scoring")
