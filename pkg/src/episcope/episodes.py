"""Reproducible N-way K-shot episode sampling and result aggregation.

Episodes are drawn from a labeled dataset index with seeded Fisher-Yates
selection (classes, then support examples, then queries), so a (index,
parameters, master seed) triple always serializes to the same bytes. Results
are kept as integer (correct, total) pairs and summarized with a Student-t
interval over per-episode accuracies.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable

import numpy as np
from scipy import stats

from .seeds import check_seed, philox_generator, substream_seed
from .variance import AccuracyPrior

RESULTS_CSV_HEADER = ["episode_id", "correct", "total"]


@dataclass(frozen=True)
class DatasetIndex:
    """Ordered class -> example-ID listing a sampler can draw from."""

    classes: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self) -> None:
        names = [name for name, _ in self.classes]
        if len(set(names)) != len(names):
            raise ValueError("class names must be unique")
        for name, ids in self.classes:
            if not ids:
                raise ValueError(f"class {name!r} has no examples")
            if len(set(ids)) != len(ids):
                raise ValueError(f"class {name!r} has duplicate example IDs")

    @classmethod
    def from_mapping(cls, mapping: dict[str, Iterable[str]]) -> "DatasetIndex":
        return cls(tuple((name, tuple(ids)) for name, ids in mapping.items()))

    @classmethod
    def load(cls, path: str | Path) -> "DatasetIndex":
        with open(path, encoding="utf-8") as fh:
            mapping = json.load(fh)
        if not isinstance(mapping, dict):
            raise ValueError(f"{path}: dataset index must be a JSON object")
        return cls.from_mapping(mapping)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({name: list(ids) for name, ids in self.classes}, fh)


@dataclass(frozen=True)
class ClassSplit:
    """One class's support/query assignment within an episode."""

    class_name: str
    support_ids: tuple[str, ...]
    query_ids: tuple[str, ...]


@dataclass(frozen=True)
class EpisodeSpec:
    """A fully materialized episode: classes plus their support/query IDs."""

    episode_id: int
    seed: int
    ways: int
    shots: int
    per_class: tuple[ClassSplit, ...]

    def __post_init__(self) -> None:
        if len(self.per_class) != self.ways:
            raise ValueError(
                f"episode {self.episode_id}: expected {self.ways} classes, "
                f"got {len(self.per_class)}"
            )
        for split in self.per_class:
            if len(split.support_ids) != self.shots:
                raise ValueError(
                    f"episode {self.episode_id}, class {split.class_name!r}: "
                    f"expected {self.shots} support IDs, got {len(split.support_ids)}"
                )
            overlap = set(split.support_ids) & set(split.query_ids)
            if overlap:
                raise ValueError(
                    f"episode {self.episode_id}, class {split.class_name!r}: "
                    f"support/query overlap {sorted(overlap)}"
                )


@dataclass(frozen=True)
class EpisodeResult:
    """Query outcome of one evaluated episode, as exact integers."""

    episode_id: int
    correct: int
    total: int

    def __post_init__(self) -> None:
        if self.total < 1:
            raise ValueError(f"episode {self.episode_id}: total must be >= 1")
        if not 0 <= self.correct <= self.total:
            raise ValueError(
                f"episode {self.episode_id}: correct={self.correct} outside [0, {self.total}]"
            )

    @property
    def accuracy(self) -> float:
        return self.correct / self.total


@dataclass(frozen=True)
class AggregateReport:
    """Mean accuracy with inter-episode std and Student-t 95% half-width."""

    episodes: int
    mean_acc: float
    std_acc: float
    ci95_halfwidth: float

    def formatted(self) -> str:
        """Accuracy as percentage points, e.g. ``93.13 ± 0.51``."""
        return f"{100.0 * self.mean_acc:.2f} ± {100.0 * self.ci95_halfwidth:.2f}"

    def to_dict(self) -> dict[str, float | int]:
        return {
            "episodes": self.episodes,
            "mean_acc": self.mean_acc,
            "std_acc": self.std_acc,
            "ci95_halfwidth": self.ci95_halfwidth,
        }


def _fisher_yates_take(rng: np.random.Generator, items: list, k: int) -> list:
    """First k entries of a seeded partial Fisher-Yates shuffle of ``items``."""
    pool = list(items)
    n = len(pool)
    if k > n:
        raise ValueError(f"cannot take {k} items from {n}")
    if k == 0:
        return []
    picks = rng.integers(np.arange(k), n)  # picks[i] uniform on [i, n)
    for i in range(k):
        j = int(picks[i])
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample_episodes(
    index: DatasetIndex,
    ways: int,
    shots: int,
    queries_per_class: int | None,
    count: int,
    master_seed: int,
) -> list[EpisodeSpec]:
    """Draw ``count`` reproducible episodes from the index.

    ``queries_per_class=None`` assigns every non-support example of each
    chosen class as a query, in index order; an integer samples that many.
    Episode e draws from its own substream (seed output e of the SplitMix64
    sequence at the master seed), so any subset of episodes can be
    regenerated independently.
    """
    for name, value in (("ways", ways), ("shots", shots), ("count", count)):
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
    if queries_per_class is not None and (
        isinstance(queries_per_class, bool)
        or not isinstance(queries_per_class, int)
        or queries_per_class < 1
    ):
        raise ValueError(
            f"queries_per_class must be a positive integer or None, got {queries_per_class!r}"
        )
    check_seed(master_seed, "master_seed")

    if ways > len(index.classes):
        raise ValueError(
            f"cannot sample {ways}-way episodes from {len(index.classes)} classes"
        )
    needed = shots + (queries_per_class if queries_per_class is not None else 1)
    for name, ids in index.classes:
        if len(ids) < needed:
            raise ValueError(
                f"class {name!r} has {len(ids)} examples but episodes need "
                f"at least {needed} (shots + queries)"
            )

    episodes = []
    class_positions = list(range(len(index.classes)))
    for episode_id in range(count):
        seed = substream_seed(master_seed, episode_id)
        rng = philox_generator(seed)
        chosen = _fisher_yates_take(rng, class_positions, ways)
        per_class = []
        for pos in chosen:
            name, ids = index.classes[pos]
            support = _fisher_yates_take(rng, list(ids), shots)
            support_set = set(support)
            remainder = [eid for eid in ids if eid not in support_set]
            if queries_per_class is None:
                queries = remainder
            else:
                queries = _fisher_yates_take(rng, remainder, queries_per_class)
            per_class.append(ClassSplit(name, tuple(support), tuple(queries)))
        episodes.append(
            EpisodeSpec(
                episode_id=episode_id,
                seed=seed,
                ways=ways,
                shots=shots,
                per_class=tuple(per_class),
            )
        )
    return episodes


def aggregate(results: list[EpisodeResult]) -> AggregateReport:
    """Mean, inter-episode sample std and t-based 95% half-width."""
    if len(results) < 2:
        raise ValueError("aggregation needs at least 2 episode results")
    ids = [r.episode_id for r in results]
    if len(set(ids)) != len(ids):
        raise ValueError("episode IDs must be distinct")
    acc = np.array([r.accuracy for r in results])
    n = len(acc)
    std = float(np.std(acc, ddof=1))
    t975 = float(stats.t.ppf(0.975, n - 1))
    return AggregateReport(
        episodes=n,
        mean_acc=float(np.mean(acc)),
        std_acc=std,
        ci95_halfwidth=t975 * std / math.sqrt(n),
    )


def prior_from_results(results: list[EpisodeResult]) -> AccuracyPrior:
    """Accuracy prior estimated from observed per-episode accuracies.

    The sample std also contains query-sampling noise (roughly
    mean(acc*(1-acc))/Kq per episode), so it overstates the true
    inter-episode spread when Kq is small; with large query sets the bias is
    negligible.
    """
    report = aggregate(results)
    return AccuracyPrior(mean=report.mean_acc, std=report.std_acc)


# --- serialization ---------------------------------------------------------


def episode_to_json(episode: EpisodeSpec) -> str:
    """Canonical single-line JSON; equal episodes serialize to equal bytes."""
    obj = {
        "episode_id": episode.episode_id,
        "seed": episode.seed,
        "ways": episode.ways,
        "shots": episode.shots,
        "per_class": [
            {
                "class_name": split.class_name,
                "support_ids": list(split.support_ids),
                "query_ids": list(split.query_ids),
            }
            for split in episode.per_class
        ],
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def episode_from_json(line: str) -> EpisodeSpec:
    obj = json.loads(line)
    return EpisodeSpec(
        episode_id=obj["episode_id"],
        seed=obj["seed"],
        ways=obj["ways"],
        shots=obj["shots"],
        per_class=tuple(
            ClassSplit(
                class_name=split["class_name"],
                support_ids=tuple(split["support_ids"]),
                query_ids=tuple(split["query_ids"]),
            )
            for split in obj["per_class"]
        ),
    )


def write_episodes(path_or_file: str | Path | IO[str], episodes: Iterable[EpisodeSpec]) -> None:
    """Write episodes as JSON Lines, one object per line."""
    if hasattr(path_or_file, "write"):
        for episode in episodes:
            path_or_file.write(episode_to_json(episode) + "\n")
        return
    with open(path_or_file, "w", encoding="utf-8") as fh:
        for episode in episodes:
            fh.write(episode_to_json(episode) + "\n")


def read_episodes(path: str | Path) -> list[EpisodeSpec]:
    with open(path, encoding="utf-8") as fh:
        return [episode_from_json(line) for line in fh if line.strip()]


def write_results_csv(path: str | Path, results: Iterable[EpisodeResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_CSV_HEADER)
        for r in results:
            writer.writerow([r.episode_id, r.correct, r.total])


def read_results_csv(path: str | Path) -> list[EpisodeResult]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RESULTS_CSV_HEADER:
            raise ValueError(
                f"{path}: expected header {','.join(RESULTS_CSV_HEADER)!r}, got {header!r}"
            )
        return [
            EpisodeResult(episode_id=int(row[0]), correct=int(row[1]), total=int(row[2]))
            for row in reader
            if row
        ]
