"""Model checkpoints: a tensor container plus a JSON manifest.

A checkpoint ``<stem>`` is two files: ``<stem>.bin`` (see src.nn.checkpoint) and
``<stem>.json`` holding the architecture, vocabulary, seed, tool version and the
SHA-256 of the container.
"""

import logging
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError

from src.corpus.labels import Language
from src.errors import CheckpointError, IoError
from src.model.config import ModelConfig
from src.model.network import ClassifierModel
from src.model.vocab import Vocab
from src.nn.checkpoint import FORMAT_VERSION, decode_tensors, encode_tensors
from src.utils.digest import hash_bytes
from src.version import __version__

logger = logging.getLogger(__name__)


class TensorInfo(BaseModel):
    name: str
    shape: list[int]


class CheckpointManifest(BaseModel):
    """JSON side of a checkpoint."""

    format_version: int = Field(default=FORMAT_VERSION, description="Tensor container version")
    tool_version: str = Field(default=__version__, description="cmtra version that wrote it")
    language: Language | None = Field(default=None, description="Label-set language")
    model: ModelConfig = Field(..., description="Architecture hyperparameters")
    seed: int = Field(..., description="Initialization seed")
    vocab: list[str] = Field(..., description="Tokens in id order")
    vocab_min_freq: int = Field(default=1, ge=1)
    tensors: list[TensorInfo] = Field(default_factory=list)
    tensor_sha256: str = Field(..., description="SHA-256 of the tensor container")


def checkpoint_paths(stem: Path | str) -> tuple[Path, Path]:
    """(container path, manifest path) for a checkpoint stem."""
    stem = Path(stem)
    if stem.suffix in (".bin", ".json"):
        stem = stem.with_suffix("")
    return stem.with_suffix(".bin"), stem.with_suffix(".json")


def save_model(model: ClassifierModel, stem: Path | str) -> tuple[Path, Path]:
    """Write a model checkpoint.

    Returns:
        (container path, manifest path)
    """
    bin_path, json_path = checkpoint_paths(stem)
    data = encode_tensors(model.params)
    manifest = CheckpointManifest(
        language=model.language,
        model=model.config,
        seed=model.config.seed,
        vocab=list(model.vocab.tokens),
        vocab_min_freq=model.vocab.min_freq,
        tensors=[TensorInfo(name=name, shape=list(p.shape)) for name, p in model.params.items()],
        tensor_sha256=hash_bytes(data),
    )
    try:
        bin_path.parent.mkdir(parents=True, exist_ok=True)
        bin_path.write_bytes(data)
        json_path.write_text(manifest.model_dump_json(indent=2) + "\n", encoding="utf-8")
    except OSError as e:
        raise IoError(f"cannot write checkpoint {bin_path}: {e}") from e
    logger.info("Saved checkpoint %s (%d tensors)", bin_path, len(model.params))
    return bin_path, json_path


def load_model(stem: Path | str) -> ClassifierModel:
    """Read a checkpoint written by save_model.

    Parameters are restored at the manifest's dtype; the 64-bit path is bit-exact.

    Raises:
        IoError: If a file is missing or unreadable
        CheckpointError: If the files are malformed or disagree with each other
    """
    bin_path, json_path = checkpoint_paths(stem)
    try:
        raw_manifest = json_path.read_text(encoding="utf-8")
        data = bin_path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read checkpoint {bin_path.with_suffix('')}: {e}") from e
    try:
        manifest = CheckpointManifest.model_validate_json(raw_manifest)
    except ValidationError as e:
        raise CheckpointError(f"invalid checkpoint manifest {json_path}: {e}") from e
    if hash_bytes(data) != manifest.tensor_sha256:
        raise CheckpointError(
            f"{bin_path} does not match its manifest digest",
            detail="The container was modified or belongs to another checkpoint",
        )
    tensors = decode_tensors(data)
    listed = {info.name: tuple(info.shape) for info in manifest.tensors}
    actual = {name: value.shape for name, value in tensors.items()}
    if listed != actual:
        raise CheckpointError(f"{bin_path} tensors disagree with the manifest listing")
    dtype = manifest.model.np_dtype
    params = {name: value.astype(dtype) for name, value in tensors.items()}
    vocab = Vocab(tokens=tuple(manifest.vocab), min_freq=manifest.vocab_min_freq)
    try:
        return ClassifierModel(vocab, manifest.model, params, manifest.language)
    except ValueError as e:
        raise CheckpointError(f"checkpoint {bin_path} is inconsistent: {e}") from e
