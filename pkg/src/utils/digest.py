"""Content digests for run manifests."""

import hashlib
from pathlib import Path

from src.errors import IoError

_CHUNK = 1 << 16


def hash_text(text: str) -> str:
    """SHA-256 hex digest of UTF-8 text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def hash_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def hash_file(path: Path | str) -> str:
    """SHA-256 hex digest of a file's bytes.

    Raises:
        IoError: If the file cannot be read
    """
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            while chunk := f.read(_CHUNK):
                digest.update(chunk)
    except OSError as e:
        raise IoError(f"cannot hash {path}: {e}") from e
    return digest.hexdigest()
