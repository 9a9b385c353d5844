"""Durable rating storage and mean-opinion-score aggregation.

Ratings are appended to a newline-delimited JSON log and replayed on startup;
a rating is acknowledged only after its line is flushed and fsynced.  The MOS
of a method is the two-stage mean: ratings are averaged per image first, then
the image means are averaged per method.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

LEVELS = (1, 2, 3, 4, 5)


class DuplicateRatingError(Exception):
    """The (session, method, image) triple was already rated."""


@dataclass(frozen=True)
class RatingRecord:
    """One human judgment on the 1-5 quality scale."""

    session_id: str
    method: str
    image_id: str
    level: int
    timestamp: float

    def __post_init__(self) -> None:
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level}")
        if not self.session_id:
            raise ValueError("session_id must be nonempty")


@dataclass
class MosResult:
    method: str
    mos: float
    per_image: dict[str, float]
    rating_count: int


@dataclass
class StudyConfig:
    study_id: str
    reference_dir: str
    method_dirs: dict[str, str]
    image_ids: list[str]
    ratings_per_pair_target: int = 1
    shuffle_seed: int = 0


def load_study_config(path: str | Path) -> StudyConfig:
    """Parse and validate a study config; every dir must hold every image id."""
    path = Path(path)
    data = json.loads(path.read_text())
    cfg = StudyConfig(**data)
    if not cfg.study_id:
        raise ValueError("study_id must be nonempty")
    if not cfg.method_dirs:
        raise ValueError("method_dirs must not be empty")
    if not cfg.image_ids:
        raise ValueError("image_ids must not be empty")
    base = path.parent
    dirs = {"reference": cfg.reference_dir, **cfg.method_dirs}
    for name, d in dirs.items():
        directory = Path(d)
        if not directory.is_absolute():
            directory = base / directory
        for image_id in cfg.image_ids:
            if not (directory / f"{image_id}.png").is_file():
                raise ValueError(
                    f"{name} directory {directory} is missing image {image_id}.png"
                )
    return cfg


class RatingStore:
    """Append-only ndjson rating log with duplicate rejection.

    All writes are serialized through one lock; reads return consistent
    snapshots of the log prefix.
    """

    def __init__(self, path: str | Path):
        self._path = Path(path)
        self._lock = threading.Lock()
        self._records: list[RatingRecord] = []
        self._seen: set[tuple[str, str, str]] = set()
        if self._path.is_file():
            for line in self._path.read_text().splitlines():
                if not line.strip():
                    continue
                rec = RatingRecord(**json.loads(line))
                self._records.append(rec)
                self._seen.add((rec.session_id, rec.method, rec.image_id))

    @property
    def path(self) -> Path:
        return self._path

    def has(self, session_id: str, method: str, image_id: str) -> bool:
        with self._lock:
            return (session_id, method, image_id) in self._seen

    def append(self, record: RatingRecord) -> None:
        """Persist one rating; raises DuplicateRatingError on a repeat triple."""
        key = (record.session_id, record.method, record.image_id)
        with self._lock:
            if key in self._seen:
                raise DuplicateRatingError(
                    f"session {record.session_id} already rated "
                    f"{record.method}/{record.image_id}"
                )
            line = json.dumps(asdict(record)) + "\n"
            self._path.parent.mkdir(parents=True, exist_ok=True)
            with open(self._path, "a", encoding="utf-8") as fh:
                fh.write(line)
                fh.flush()
                os.fsync(fh.fileno())
            self._records.append(record)
            self._seen.add(key)

    def records(self) -> tuple[RatingRecord, ...]:
        with self._lock:
            return tuple(self._records)


def aggregate_mos(records: list[RatingRecord] | tuple[RatingRecord, ...]) -> list[MosResult]:
    """Two-stage mean per method: average per image, then across images.

    Images with no ratings for a method are simply absent from its inner
    mean.  Results are ordered by descending MOS (method name breaks ties).
    """
    by_method: dict[str, dict[str, list[int]]] = {}
    for rec in records:
        by_method.setdefault(rec.method, {}).setdefault(rec.image_id, []).append(rec.level)
    results = []
    for method, images in by_method.items():
        # summation in sorted-image order keeps the result bit-identical
        # under permutations of rating insertion order
        per_image = {
            image_id: sum(images[image_id]) / len(images[image_id])
            for image_id in sorted(images)
        }
        mos = sum(per_image.values()) / len(per_image)
        count = sum(len(levels) for levels in images.values())
        results.append(
            MosResult(method=method, mos=mos, per_image=per_image, rating_count=count)
        )
    results.sort(key=lambda r: (-r.mos, r.method))
    return results


def export_ratings(records: list[RatingRecord] | tuple[RatingRecord, ...]) -> str:
    """All records as newline-delimited JSON with stable field order."""
    return "".join(json.dumps(asdict(rec)) + "\n" for rec in records)


def import_ratings(text: str) -> list[RatingRecord]:
    """Inverse of :func:`export_ratings`."""
    return [
        RatingRecord(**json.loads(line))
        for line in text.splitlines()
        if line.strip()
    ]
