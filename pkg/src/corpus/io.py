"""Reading and writing corpus TSV files.

Two formats are supported:

- the distributed two-column format ``<text>\\t<label>`` (or ``<text>`` unlabeled)
- the tagged three-column format ``<text>\\t<label>\\t<origin>`` used for pseudo-labeled
  and CM-TRA datasets
"""

import logging
from pathlib import Path

from src.corpus.dataset import (
    Dataset,
    LabeledComment,
    Origin,
    Split,
    parse_tsv_record,
    serialize_record,
)
from src.corpus.labels import Language, parse_label
from src.errors import DataError, IoError, LabelSetError, RecordError

logger = logging.getLogger(__name__)

# Header lines seen in the distributed files. Only an exact match is a header.
KNOWN_HEADERS = frozenset(
    {
        "text\tcategory",
        "text\tlabel",
        "comment\tlabel",
        "text\tlabel\torigin",
        "text",
    }
)


def _read_lines(path: Path) -> list[str]:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            content = f.read()
    except FileNotFoundError:
        raise IoError(f"file not found: {path}", detail="Check the data paths in the config") from None
    except UnicodeDecodeError as e:
        raise IoError(f"{path} is not valid UTF-8: {e}") from e
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    # Only LF and CRLF terminate records; other Unicode line breaks belong to the text.
    lines = [line.removesuffix("\r") for line in content.split("\n")]
    if lines and not lines[-1]:
        lines.pop()
    return lines


def _records(path: Path) -> list[tuple[int, str]]:
    """Return (1-based line number, line) pairs with header and blank lines removed."""
    lines = _read_lines(path)
    records = []
    for number, line in enumerate(lines, start=1):
        if number == 1 and line.lstrip("\ufeff") in KNOWN_HEADERS:
            logger.debug("Skipping header line in %s", path)
            continue
        if not line.strip():
            logger.warning("Skipping blank line %d in %s", number, path)
            continue
        records.append((number, line))
    return records


def load_split(
    path: Path | str,
    language: Language,
    split: Split,
    labeled: bool = True,
) -> Dataset:
    """Load a distributed corpus file.

    Args:
        path: UTF-8 TSV file, one record per line, optional single header line
        language: Corpus language
        split: Split tag to attach
        labeled: Whether records carry a label field

    Returns:
        Dataset of CODE_MIXED samples in file order

    Raises:
        IoError: If the file cannot be read
        RecordError: If a record fails to parse (carries the line number)
    """
    path = Path(path)
    samples = []
    for number, line in _records(path):
        try:
            samples.append(parse_tsv_record(line.lstrip("\ufeff"), language, labeled))
        except DataError as e:
            raise RecordError(str(path), number, e) from e
    logger.info("Loaded %d %s samples from %s", len(samples), split.value, path)
    return Dataset(tuple(samples), language, split)


def read_tagged(path: Path | str, language: Language, split: Split = Split.TRAIN) -> Dataset:
    """Load a three-column ``text, label, origin`` file written by write_dataset."""
    path = Path(path)
    samples = []
    for number, line in _records(path):
        try:
            body, sep, raw_origin = line.rpartition("\t")
            text, sep2, raw_label = body.rpartition("\t")
            if not sep or not sep2:
                raise DataError("tagged record needs text, label and origin fields")
            try:
                origin = Origin(raw_origin)
            except ValueError:
                raise DataError(f"unknown origin tag: {raw_origin!r}") from None
            label = parse_label(raw_label) if raw_label else None
            if label is not None and not language.permits(label):
                raise LabelSetError(f"label {label.code} is not permitted for {language.value}")
            samples.append(LabeledComment(text, label, language, origin))
        except DataError as e:
            raise RecordError(str(path), number, e) from e
    return Dataset(tuple(samples), language, split)


def serialize_dataset(dataset: Dataset, with_origin: bool = False) -> str:
    """Serialize a dataset to TSV text with LF line endings."""
    return "".join(serialize_record(s, with_origin) + "\n" for s in dataset.samples)


def write_dataset(dataset: Dataset, path: Path | str, with_origin: bool = False) -> Path:
    """Write a dataset as TSV (two columns, or three with ``with_origin``).

    Returns:
        The written path
    """
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(serialize_dataset(dataset, with_origin), encoding="utf-8", newline="")
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    logger.info("Wrote %d samples to %s", len(dataset), path)
    return path
