"""Run manifest: what a pipeline run consumed, did and produced.

The manifest carries the full effective config, its hash, the root seed, the tool
version and SHA-256 digests of every input file, which is enough to rerun the
experiment exactly.
"""

from datetime import UTC, datetime
from enum import StrEnum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from src.cli.config import ExperimentConfig, config_hash
from src.errors import CmtraError, IoError
from src.utils.digest import hash_file
from src.version import __version__

MANIFEST_NAME = "manifest.json"


class StageStatus(StrEnum):
    PENDING = "pending"
    OK = "ok"
    FAILED = "failed"


class StageRecord(BaseModel):
    """Outcome of one pipeline stage."""

    name: str = Field(..., description="Stage name")
    status: StageStatus = Field(default=StageStatus.PENDING)
    error: str | None = Field(default=None, description="Error message when failed")
    error_code: str | None = Field(default=None, description="Error code when failed")


class InputDigest(BaseModel):
    """One input file and its digest."""

    role: str = Field(..., description="train, dev, test or translit_table")
    path: str
    sha256: str


class RunManifest(BaseModel):
    """Complete record of one run."""

    tool_version: str = Field(default=__version__, description="cmtra version")
    created_at: str = Field(
        default_factory=lambda: datetime.now(UTC).isoformat(),
        description="Run start (ISO 8601)",
    )
    config_hash: str = Field(..., description="SHA-256 of the canonical config JSON")
    seed: int = Field(..., description="Root seed")
    language: str
    variant: str
    config: dict[str, Any] = Field(..., description="Effective configuration")
    inputs: list[InputDigest] = Field(default_factory=list)
    stages: list[StageRecord] = Field(default_factory=list)
    artifacts: list[str] = Field(default_factory=list, description="Files written, relative to the run directory")
    failed_stage: str | None = Field(default=None)
    exit_code: int = Field(default=0)

    @classmethod
    def create(cls, config: ExperimentConfig) -> "RunManifest":
        """Start a manifest for ``config`` with no stages run yet."""
        return cls(
            config_hash=config_hash(config),
            seed=config.seed,
            language=config.language.value,
            variant=config.variant.value,
            config=config.model_dump(mode="json"),
        )

    def add_input(self, role: str, path: Path) -> InputDigest:
        digest = InputDigest(role=role, path=str(path), sha256=hash_file(path))
        self.inputs.append(digest)
        return digest

    def digest_for(self, role: str) -> str | None:
        for item in self.inputs:
            if item.role == role:
                return item.sha256
        return None

    def start_stage(self, name: str) -> StageRecord:
        record = StageRecord(name=name)
        self.stages.append(record)
        return record

    def finish_stage(self, record: StageRecord) -> None:
        record.status = StageStatus.OK

    def fail_stage(self, record: StageRecord, error: Exception) -> None:
        record.status = StageStatus.FAILED
        record.error = str(error)
        record.error_code = error.code if isinstance(error, CmtraError) else type(error).__name__
        self.failed_stage = record.name
        self.exit_code = error.exit_code if isinstance(error, CmtraError) else 1

    def add_artifact(self, path: Path, run_dir: Path) -> None:
        name = path.relative_to(run_dir).as_posix() if path.is_relative_to(run_dir) else str(path)
        if name not in self.artifacts:
            self.artifacts.append(name)

    def write(self, run_dir: Path) -> Path:
        path = run_dir / MANIFEST_NAME
        try:
            run_dir.mkdir(parents=True, exist_ok=True)
            path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        except OSError as e:
            raise IoError(f"cannot write run manifest {path}: {e}") from e
        return path


def load_manifest(path: Path | str) -> RunManifest:
    """Read a manifest written by RunManifest.write."""
    path = Path(path)
    try:
        return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise IoError(f"cannot read run manifest {path}: {e}") from e
