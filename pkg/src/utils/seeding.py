"""Named random substreams derived from one experiment seed.

Each consumer (``init``, ``shuffle``, ``dropout``, ...) draws from its own stream,
so adding or removing draws in one stage never shifts another stage's numbers.
"""

import hashlib

import numpy as np


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def substream(seed: int, *names: str) -> np.random.Generator:
    """Generator for the substream ``seed / names[0] / names[1] / ...``.

    Args:
        seed: Experiment seed (non-negative)
        names: Path of stream names, e.g. ("final", "shuffle")

    Returns:
        A PCG64 generator that depends only on ``seed`` and ``names``
    """
    sequence = np.random.SeedSequence(seed, spawn_key=tuple(_name_key(n) for n in names))
    return np.random.Generator(np.random.PCG64(sequence))
