"""Whitespace tokenizer and token vocabulary."""

import logging
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import numpy as np

from src.corpus.dataset import Dataset
from src.errors import ConfigError, EmptyCorpusError
from src.translit.scripts import Script, detect_script

logger = logging.getLogger(__name__)

PAD_ID = 0
UNK_ID = 1
CLS_ID = 2
RESERVED_TOKENS = ("<pad>", "<unk>", "<cls>")


def tokenize(text: str) -> list[str]:
    """Split on whitespace; Latin letters are lowercased, other scripts kept as-is."""
    return [
        "".join(ch.lower() if detect_script(ch) is Script.LATIN else ch for ch in token)
        for token in text.split()
    ]


@dataclass(frozen=True)
class Vocab:
    """Token to id map with reserved ids PAD=0, UNK=1, CLS=2.

    Attributes:
        tokens: Tokens in id order, reserved tokens first
        min_freq: Frequency threshold the vocabulary was built with
    """

    tokens: tuple[str, ...]
    min_freq: int = 1
    _ids: Mapping[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.tokens[: len(RESERVED_TOKENS)] != RESERVED_TOKENS:
            raise ConfigError("vocabulary must start with the reserved tokens <pad>, <unk>, <cls>")
        ids = {token: i for i, token in enumerate(self.tokens)}
        if len(ids) != len(self.tokens):
            raise ConfigError("vocabulary tokens must be unique")
        object.__setattr__(self, "_ids", ids)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: object) -> bool:
        return token in self._ids

    def lookup(self, token: str) -> int:
        """Id of a text token; unseen tokens and reserved token strings map to UNK."""
        if token in RESERVED_TOKENS:
            return UNK_ID
        return self._ids.get(token, UNK_ID)


def build_vocab(corpus: Dataset | Iterable[str], min_freq: int = 1) -> Vocab:
    """Build a vocabulary from a dataset or an iterable of texts.

    Tokens seen fewer than ``min_freq`` times are left out and will map to UNK.
    Ids are assigned by descending frequency, ties broken by token.

    Raises:
        ConfigError: If min_freq < 1
        EmptyCorpusError: If the corpus has no tokens
    """
    if min_freq < 1:
        raise ConfigError(f"min_freq must be >= 1, got {min_freq}")
    texts = corpus.texts() if isinstance(corpus, Dataset) else corpus
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(tokenize(text))
    if not counts:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    kept = sorted(
        (token for token, count in counts.items() if count >= min_freq and token not in RESERVED_TOKENS),
        key=lambda token: (-counts[token], token),
    )
    logger.info(
        "Vocabulary: %d of %d distinct tokens kept (min_freq=%d)", len(kept), len(counts), min_freq
    )
    return Vocab(tokens=RESERVED_TOKENS + tuple(kept), min_freq=min_freq)


def encode_text(text: str, vocab: Vocab, max_len: int) -> list[int]:
    """[CLS] followed by token ids, truncated and padded with PAD to ``max_len``.

    Raises:
        ConfigError: If max_len < 2
    """
    if max_len < 2:
        raise ConfigError(f"max_len must be >= 2, got {max_len}")
    ids = [CLS_ID] + [vocab.lookup(token) for token in tokenize(text)]
    ids = ids[:max_len]
    return ids + [PAD_ID] * (max_len - len(ids))


def encode_batch(texts: Iterable[str], vocab: Vocab, max_len: int) -> np.ndarray:
    """Encode texts into an int64 array of shape (len(texts), max_len)."""
    rows = [encode_text(text, vocab, max_len) for text in texts]
    if not rows:
        return np.zeros((0, max_len), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)
