"""cmtra: semi-supervised offensive-language classification for code-mixed Dravidian text."""

from src.version import __version__, __version_info__

__all__ = ["__version__", "__version_info__"]
