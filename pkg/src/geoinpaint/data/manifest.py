"""
Dataset manifests.

A manifest is a JSON-lines file with one record per line:
``{"image": ..., "mask" | "seed_pool": ..., "label": ..., "split": "train" | "test"}``.
Relative paths are resolved against the manifest's directory.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError

from ..core.constants import Split, TaskKind
from ..core.exceptions import ManifestError
from ..core.logging import get_logger

logger = get_logger(__name__)


class GeolocationLabel(BaseModel):
    """Identity shared by a street-view image and its satellite counterpart."""

    model_config = ConfigDict(extra="forbid")

    identity: int = Field(ge=0)
    satellite: Path


class ManifestRecord(BaseModel):
    """One manifest line."""

    model_config = ConfigDict(extra="forbid")

    image: Path
    mask: Optional[Path] = None
    seed_pool: Optional[Path] = None
    label: Union[int, GeolocationLabel, str]
    split: Split


@dataclass
class DatasetManifest:
    """Validated manifest with the task kind and image size it is used with."""

    path: Path
    task: TaskKind
    image_size: int
    records: List[ManifestRecord] = field(default_factory=list)

    def split(self, split: Split) -> List[ManifestRecord]:
        """Records of one split, in file order."""
        return [r for r in self.records if r.split == split]

    def __len__(self) -> int:
        return len(self.records)


def _resolve(base: Path, path: Path) -> Path:
    return path if path.is_absolute() else (base / path).resolve()


def _check_label(
    record: ManifestRecord, task: TaskKind, base: Path, line_no: int
) -> ManifestRecord:
    label = record.label
    where = f"line {line_no}"

    if task == TaskKind.GEOLOCATION:
        if not isinstance(label, GeolocationLabel):
            raise ManifestError(f"{where}: geolocation label needs identity and satellite")
        satellite = _resolve(base, label.satellite)
        if not satellite.is_file():
            raise ManifestError(f"{where}: satellite image not found: {satellite}")
        return record.model_copy(
            update={"label": label.model_copy(update={"satellite": satellite})}
        )

    if task == TaskKind.SEGMENTATION:
        if not isinstance(label, str):
            raise ManifestError(f"{where}: segmentation label must be a class-map path")
        class_map = _resolve(base, Path(label))
        if not class_map.is_file():
            raise ManifestError(f"{where}: class map not found: {class_map}")
        return record.model_copy(update={"label": str(class_map)})

    if isinstance(label, bool) or not isinstance(label, int) or label < 0:
        raise ManifestError(f"{where}: {task.value} label must be a nonnegative class id")
    return record


def _parse_record(raw: str, base: Path, task: TaskKind, line_no: int) -> ManifestRecord:
    try:
        record = ManifestRecord.model_validate(json.loads(raw))
    except json.JSONDecodeError as e:
        raise ManifestError(f"line {line_no}: invalid JSON: {e}") from e
    except PydanticValidationError as e:
        raise ManifestError(f"line {line_no}: invalid record: {e}") from e

    if (record.mask is None) == (record.seed_pool is None):
        raise ManifestError(f"line {line_no}: exactly one of mask or seed_pool is required")
    if record.split == Split.TEST and record.mask is None:
        raise ManifestError(f"line {line_no}: test records need a pre-baked mask")

    updates = {"image": _resolve(base, record.image)}
    if record.mask is not None:
        updates["mask"] = _resolve(base, record.mask)
    if record.seed_pool is not None:
        updates["seed_pool"] = _resolve(base, record.seed_pool)
    record = record.model_copy(update=updates)

    if not record.image.is_file():
        raise ManifestError(f"line {line_no}: image not found: {record.image}")
    if record.mask is not None and not record.mask.is_file():
        raise ManifestError(f"line {line_no}: mask not found: {record.mask}")
    if record.seed_pool is not None and not record.seed_pool.is_dir():
        raise ManifestError(f"line {line_no}: seed pool not found: {record.seed_pool}")

    return _check_label(record, task, base, line_no)


def load_manifest(path: Path, task: TaskKind, image_size: int) -> DatasetManifest:
    """
    Load and validate a JSON-lines manifest.

    Args:
        path: Manifest file
        task: Task kind the labels must fit
        image_size: Side length samples are resized to

    Returns:
        DatasetManifest with absolute paths

    Raises:
        ManifestError: If the file is missing or unparsable, a record is invalid,
            a referenced file is missing, or an image appears in both splits
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ManifestError(f"Cannot read manifest {path}: {e}") from e

    base = path.parent.resolve()
    records = [
        _parse_record(line, base, task, line_no)
        for line_no, line in enumerate(lines, start=1)
        if line.strip()
    ]

    train_images = {r.image for r in records if r.split == Split.TRAIN}
    overlap = sorted(
        str(r.image) for r in records if r.split == Split.TEST and r.image in train_images
    )
    if overlap:
        raise ManifestError(f"Images present in both splits: {', '.join(overlap)}")

    manifest = DatasetManifest(path=path, task=task, image_size=image_size, records=records)
    logger.info(
        "manifest_loaded",
        path=str(path),
        train=len(manifest.split(Split.TRAIN)),
        test=len(manifest.split(Split.TEST)),
    )
    return manifest
