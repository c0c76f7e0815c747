"""cmtra version.

Recorded in checkpoint and run manifests; bump it whenever a fixed config and seed
can produce different model output.
"""

MAJOR = 0
MINOR = 3
PATCH = 0

__version__ = f"{MAJOR}.{MINOR}.{PATCH}"
__version_info__ = (MAJOR, MINOR, PATCH)
