"""Mini-batch training, prediction and per-epoch history."""

import json
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from src.corpus.dataset import Dataset, validate_labels
from src.corpus.labels import OffenseLabel
from src.errors import IoError, LabelSetError, LanguageMismatchError, NumericalError
from src.evaluation.metrics import aggregate_metrics, confusion_matrix, per_class_prf
from src.model.config import TrainConfig
from src.model.network import (
    ClassifierModel,
    layer_group,
    loss_and_grads,
    predict_ids,
)
from src.nn.optim import OptimizerState, adamw_step, schedule_lr
from src.utils.seeding import substream

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    """Metrics for one epoch.

    Attributes:
        epoch: 1-based epoch number
        train_loss: Sample-weighted mean training loss over the epoch's batches
        train_acc: Accuracy on the training set in evaluation mode after the epoch
        dev_acc: Dev-split accuracy, when a dev split was given
        dev_macro_f1: Dev-split macro F1, when a dev split was given
        stage: Which model of the run this record belongs to ("labeler" or "final")
    """

    epoch: int
    train_loss: float
    train_acc: float
    dev_acc: float | None = None
    dev_macro_f1: float | None = None
    stage: str = "final"

    def to_dict(self) -> dict[str, object]:
        return asdict(self)


@dataclass
class History:
    """Per-epoch records of a training run."""

    records: list[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def losses(self) -> list[float]:
        return [record.train_loss for record in self.records]

    def extend(self, other: "History") -> None:
        self.records.extend(other.records)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(record.to_dict()) + "\n" for record in self.records)

    def write_jsonl(self, path: Path | str) -> Path:
        path = Path(path)
        try:
            path.write_text(self.to_jsonl(), encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write training history {path}: {e}") from e
        return path


ProgressCallback = Callable[[EpochRecord], None]


def compute_class_weights(targets: np.ndarray, num_classes: int) -> np.ndarray:
    """Inverse-frequency weights N / (num_classes * count_c); absent classes get 0.

    With every class equally frequent all weights are 1.
    """
    counts = np.bincount(targets, minlength=num_classes).astype(np.float64)
    weights = np.zeros(num_classes, dtype=np.float64)
    present = counts > 0
    weights[present] = len(targets) / (num_classes * counts[present])
    return weights


def _targets(model: ClassifierModel, data: Dataset) -> np.ndarray:
    if model.language is not None and data.language is not model.language:
        raise LanguageMismatchError(
            f"{model.language.value} model cannot train on {data.language.value} data"
        )
    labels = data.labels()
    result = validate_labels(data)
    if not result.is_valid:
        index, label = result.violations[0]
        raise LabelSetError(f"sample {index} has label {label.code}, not permitted for {data.language.value}")
    return np.asarray([model.class_index(label) for label in labels], dtype=np.int64)


def _frozen(group: int, epoch: int, top_group: int, freeze_epochs: int) -> bool:
    # Group g starts training at epoch (top - g) * k; the head trains from the start.
    return epoch < (top_group - group) * freeze_epochs


def evaluate_accuracy(model: ClassifierModel, ids: np.ndarray, targets: np.ndarray, batch_size: int) -> float:
    if len(targets) == 0:
        return 0.0
    predicted = np.argmax(predict_ids(model, ids, batch_size), axis=1)
    return float(np.mean(predicted == targets))


def _dev_scores(model: ClassifierModel, dev: Dataset, batch_size: int) -> tuple[float, float]:
    gold = dev.labels()
    probs = predict_ids(model, model.encode(dev.texts()), batch_size)
    predicted = [model.labels[i] for i in np.argmax(probs, axis=1)]
    matrix = confusion_matrix(gold, predicted, model.labels)
    report = aggregate_metrics(per_class_prf(matrix), matrix)
    return report.accuracy, report.macro_f1


def train(
    model: ClassifierModel,
    data: Dataset,
    cfg: TrainConfig,
    dev: Dataset | None = None,
    stage: str = "final",
    progress: ProgressCallback | None = None,
) -> tuple[ClassifierModel, History]:
    """Train ``model`` in place with AdamW and the slanted triangular schedule.

    Each epoch draws one permutation from the ``stage/shuffle`` substream, walks it in
    batches of ``cfg.batch_size`` and applies one AdamW step per parameter tensor with
    its layer group's learning rate. Frozen groups (gradual unfreezing) are skipped.

    Args:
        model: Model to update
        data: Labeled training data in the model's language
        cfg: Training settings
        dev: Optional dev split, scored after each epoch (never used for selection)
        stage: Substream and history tag, e.g. "labeler" or "final"
        progress: Called with each epoch's record

    Returns:
        (the same model, history with exactly cfg.epochs records)

    Raises:
        UnlabeledSampleError: If a sample has no label
        NumericalError: If a batch loss is not finite
    """
    targets = _targets(model, data)
    ids = model.encode(data.texts())
    num_samples = len(targets)
    batches_per_epoch = max(math.ceil(num_samples / cfg.batch_size), 1)
    total_steps = cfg.epochs * batches_per_epoch
    schedule = cfg.schedule.model_copy(update={"total_steps": total_steps})
    num_groups = model.num_layer_groups
    top_group = num_groups - 1
    groups = {name: layer_group(name, model.config.num_layers) for name in model.params}
    states = {
        name: OptimizerState.for_param(value, lr=schedule.base_lr, config=cfg.optimizer)
        for name, value in model.params.items()
    }
    class_weights = (
        compute_class_weights(targets, model.config.num_classes).astype(model.config.np_dtype)
        if cfg.class_weighting
        else None
    )
    shuffle_rng = substream(cfg.seed, stage, "shuffle")
    dropout_rng = substream(cfg.seed, stage, "dropout")
    has_dev = dev is not None and len(dev) > 0

    logger.info(
        "Training %s model: %d samples, %d epochs, %d steps", stage, num_samples, cfg.epochs, total_steps
    )
    history = History()
    step = 0
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(num_samples)
        loss_sum = 0.0
        for start in range(0, num_samples, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            loss, grads, _ = loss_and_grads(
                model, ids[batch], targets[batch], class_weights, train_mode=True, rng=dropout_rng
            )
            if not math.isfinite(loss):
                raise NumericalError(
                    f"non-finite loss at epoch {epoch + 1}, step {step}",
                    detail=f"batch rows {batch[:8].tolist()}...; try --debug-numerics or a lower learning rate",
                )
            for name, param in model.params.items():
                group = groups[name]
                if _frozen(group, epoch, top_group, cfg.freeze_epochs_per_layer):
                    continue
                lr = schedule_lr(step, group, num_groups, schedule)
                updated, _ = adamw_step(param, grads[name], states[name], lr)
                param[...] = updated
            loss_sum += loss * len(batch)
            logger.debug("epoch %d step %d loss %.6f", epoch + 1, step, loss)
            step += 1

        record = EpochRecord(
            epoch=epoch + 1,
            train_loss=loss_sum / num_samples if num_samples else 0.0,
            train_acc=evaluate_accuracy(model, ids, targets, cfg.eval_batch_size),
            stage=stage,
        )
        if has_dev:
            record.dev_acc, record.dev_macro_f1 = _dev_scores(model, dev, cfg.eval_batch_size)
        history.records.append(record)
        logger.info(
            "%s epoch %d/%d: loss %.4f, train acc %.4f",
            stage,
            record.epoch,
            cfg.epochs,
            record.train_loss,
            record.train_acc,
        )
        if progress is not None:
            progress(record)
    return model, history


def predict(
    model: ClassifierModel, texts: Sequence[str]
) -> list[tuple[OffenseLabel, np.ndarray]]:
    """Label and probability vector for each text.

    The label is the argmax of the evaluation-mode probabilities; ties go to the
    lowest class index, i.e. the earliest label in canonical order.
    """
    probs = model.predict_proba(texts)
    labels = model.labels
    return [(labels[int(np.argmax(row))], row) for row in probs]
