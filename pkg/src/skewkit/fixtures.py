"""Deterministic synthetic datasets.

Two generators:

- :func:`make_separable_dataset` builds small splits whose two classes use
  disjoint keyword vocabularies, so any reasonable model separates them;
  used for smoke training, sweeps, and probe tests.
- :func:`write_fixture` materializes full-size splits whose class counts
  equal the built-in reference distribution of the official corpora, so
  dataset audits can run without the (undistributable) official data.

Everything is a pure function of the seed.
"""

from __future__ import annotations

import random
from pathlib import Path

from .corpus import DatasetSplit, LabeledSample, write_split
from .reference import CLASS_COUNTS, GENRE_FRACTIONS_1A
from .tasks import get_task

# Disjoint consonant sets guarantee the two keyword vocabularies never overlap.
_CONSONANTS = ("bdgklp", "mnrstz")
_VOWELS = "aiu"


def _vocabulary(class_index: int, size: int, rng: random.Random) -> list[str]:
    consonants = _CONSONANTS[class_index]
    words = set()
    while len(words) < size:
        syllables = rng.randint(2, 4)
        words.add("".join(rng.choice(consonants) + rng.choice(_VOWELS) for _ in range(syllables)))
    return sorted(words)


def _make_samples(task, counts: dict[str, int], prefix: str, rng: random.Random,
                  vocabs: dict[str, list[str]],
                  genre_fraction: dict[str, float] | None = None) -> list[LabeledSample]:
    pool = [label for label, n in counts.items() for _ in range(n)]
    rng.shuffle(pool)
    samples = []
    for i, label in enumerate(pool):
        words = rng.choices(vocabs[label], k=rng.randint(6, 12))
        genre = None
        if genre_fraction is not None:
            # deterministic per-split genre mix: first round(f*n) samples are
            # paragraphs within the shuffled order
            paragraph_quota = round(genre_fraction["paragraph"] * len(pool))
            genre = "paragraph" if i < paragraph_quota else "tweet"
        samples.append(
            LabeledSample(id=f"{prefix}-{i:05d}", text=" ".join(words), label=label, genre=genre)
        )
    return samples


def _task_vocabularies(task_id: str, seed: int) -> dict[str, list[str]]:
    """Class keyword vocabularies shared by every split of one (task, seed)."""
    task = get_task(task_id)
    rng = random.Random(f"vocab/{seed}/{task_id}")
    return {label: _vocabulary(i, 40, rng) for i, label in enumerate(task.labels)}


def make_split(task_id: str, split_name: str, counts: dict[str, int], seed: int = 0,
               genre_fraction: dict[str, float] | None = None) -> DatasetSplit:
    """One synthetic split with exactly the requested per-class counts."""
    task = get_task(task_id)
    rng = random.Random(f"split/{seed}/{task_id}/{split_name}")
    vocabs = _task_vocabularies(task_id, seed)
    samples = _make_samples(task, counts, f"{task_id}-{split_name}", rng, vocabs, genre_fraction)
    return DatasetSplit(split_name=split_name, task=task, samples=tuple(samples))


def make_separable_dataset(
    task_id: str,
    n_train: int = 64,
    n_dev: int = 32,
    n_test: int = 32,
    minority_fraction: float = 0.25,
    seed: int = 0,
) -> tuple[DatasetSplit, DatasetSplit, DatasetSplit]:
    """Small separable train/dev/test splits with a configurable imbalance."""
    task = get_task(task_id)
    majority, minority = task.labels
    if task.minority_label == majority:
        majority, minority = minority, majority

    def counts(n: int) -> dict[str, int]:
        k = max(1, round(minority_fraction * n))
        return {majority: n - k, minority: k}

    return (
        make_split(task_id, "train", counts(n_train), seed),
        make_split(task_id, "dev", counts(n_dev), seed),
        make_split(task_id, "test", counts(n_test), seed),
    )


def fixture_splits(task_id: str, seed: int = 0) -> dict[str, DatasetSplit]:
    """Synthetic splits mirroring the reference class counts of a task."""
    genre = GENRE_FRACTIONS_1A if task_id == "1A" else None
    splits = {}
    for split_name in ("train", "dev", "test"):
        counts = CLASS_COUNTS[task_id][split_name]
        splits[split_name] = make_split(task_id, split_name, counts, seed, genre_fraction=genre)
    return splits


def write_fixture(task_id: str, out_dir: str | Path, seed: int = 0) -> dict[str, Path]:
    """Write the audit fixture to disk; returns the per-split file paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for split_name, split in fixture_splits(task_id, seed).items():
        path = out_dir / f"{task_id}_{split_name}.jsonl"
        write_split(split, path)
        paths[split_name] = path
    return paths
