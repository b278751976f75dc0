"""Dataset ingestion, validation, and class-distribution auditing.

Storage format: UTF-8 JSON lines, one record per line with fields
``id``, ``text``, ``label`` and optional ``genre``. Unknown extra fields
are preserved on the sample but otherwise ignored. Prediction files are
two-column TSV (id, label), no header, order follows input order.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DuplicateId,
    EmptyFile,
    EmptySplit,
    IoFailure,
    LengthMismatch,
    MissingField,
    NoGenreAnnotations,
    UnknownLabel,
)
from .tasks import TaskSpec, get_task

GENRES = ("tweet", "paragraph")
SPLIT_NAMES = ("train", "dev", "test")


@dataclass(frozen=True)
class LabeledSample:
    """One text unit (tweet or news paragraph) with a binary label."""

    id: str
    text: str
    label: str
    genre: str | None = None
    extra: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class DatasetSplit:
    split_name: str
    task: TaskSpec
    samples: tuple[LabeledSample, ...]

    def __post_init__(self):
        if self.split_name not in SPLIT_NAMES:
            raise ValueError(f"split_name must be one of {SPLIT_NAMES}, got {self.split_name!r}")
        if not self.samples:
            raise EmptySplit(f"{self.task.task_id}/{self.split_name} has no samples")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def task_id(self) -> str:
        return self.task.task_id

    def labels(self) -> list[str]:
        return [s.label for s in self.samples]

    def ids(self) -> list[str]:
        return [s.id for s in self.samples]


@dataclass(frozen=True)
class ClassDistribution:
    """Label counts plus ratios recomputed from the counts.

    Ratios are always derived from counts, never trusted from metadata.
    """

    counts: dict[str, int]

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def ratios(self) -> dict[str, float]:
        total = self.total
        return {label: count / total for label, count in self.counts.items()}


def _validate_sample(record: dict, task: TaskSpec, line_no: int) -> LabeledSample:
    for required in ("id", "text", "label"):
        if required not in record:
            raise MissingField(required, line_no)
    text = str(record["text"])
    if not text.strip():
        raise MissingField("text", line_no)
    label = str(record["label"])
    if label not in task.labels:
        raise UnknownLabel(label, task.labels)
    genre = record.get("genre")
    if genre is not None and genre not in GENRES:
        raise MissingField("genre", line_no)
    extra = {k: v for k, v in record.items() if k not in ("id", "text", "label", "genre")}
    return LabeledSample(id=str(record["id"]), text=text, label=label, genre=genre, extra=extra)


def load_split(path: str | Path, task_id: str, split_name: str) -> DatasetSplit:
    """Load and validate one JSONL split file.

    Rejects duplicate ids, unknown labels, and records missing id/text/label.
    """
    task = get_task(task_id)
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc

    samples: list[LabeledSample] = []
    seen: set[str] = set()
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IoFailure(f"{path}:{line_no}: not valid JSON: {exc}") from exc
        sample = _validate_sample(record, task, line_no)
        if sample.id in seen:
            raise DuplicateId(sample.id)
        seen.add(sample.id)
        samples.append(sample)

    if not samples:
        raise EmptyFile(f"{path} contains no records")
    return DatasetSplit(split_name=split_name, task=task, samples=tuple(samples))


def write_split(split: DatasetSplit, path: str | Path) -> None:
    """Serialize a split back to JSONL; load_split(write_split(s)) == s."""
    path = Path(path)
    lines = []
    for s in split.samples:
        record: dict = {"id": s.id, "text": s.text, "label": s.label}
        if s.genre is not None:
            record["genre"] = s.genre
        record.update(s.extra)
        lines.append(json.dumps(record, ensure_ascii=False, sort_keys=True))
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def class_distribution(split: DatasetSplit) -> ClassDistribution:
    """Exact label frequencies for a split; every vocabulary label appears."""
    counts = Counter(split.labels())
    return ClassDistribution(counts={lab: counts.get(lab, 0) for lab in split.task.labels})


def genre_distribution(split: DatasetSplit) -> dict[str, float]:
    """Genre fractions over the genre-annotated samples of a split."""
    annotated = [s.genre for s in split.samples if s.genre is not None]
    if not annotated:
        raise NoGenreAnnotations(f"{split.task_id}/{split.split_name} carries no genre annotations")
    counts = Counter(annotated)
    total = len(annotated)
    return {genre: counts[genre] / total for genre in sorted(counts)}


def write_predictions(ids, labels, path: str | Path) -> None:
    """Write a two-column (id, label) prediction file in input order."""
    ids = list(ids)
    labels = list(labels)
    if len(ids) != len(labels):
        raise LengthMismatch(f"{len(ids)} ids vs {len(labels)} labels")
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for sample_id, label in zip(ids, labels):
                fh.write(f"{sample_id}\t{label}\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_predictions(path: str | Path) -> list[tuple[str, str]]:
    """Read (id, label) pairs from a prediction file, preserving order."""
    path = Path(path)
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    pairs: list[tuple[str, str]] = []
    for line_no, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise IoFailure(f"{path}:{line_no}: expected two tab-separated columns")
        pairs.append((parts[0], parts[1]))
    return pairs
