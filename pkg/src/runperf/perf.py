"""Performance categories from split times, and labeled dataset assembly.

Split times at a recording point are mapped to C performance categories by
rank: sort runners ascending by (split_time, runner_id) and give rank r the
label floor(r * C / n) + 1.  Faster runners get lower labels and class
counts differ by at most one, so C=2 splits at the median and C=4 yields
quartiles.  Labeled examples pair a clip embedding with the category either
at the same recording point ("current") or at the following one ("next").
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio.formats import _format_sig9
from .dataio.types import CONTEXT_MODES, LOGITS_DIM, ClipRecord, DataError, SplitRecord

CATEGORY_COUNTS = (2, 3, 4)


@dataclass(frozen=True)
class CategoryLabel:
    """A performance category: 1 (fastest) through C (slowest)."""

    value: int
    C: int

    def __post_init__(self):
        if self.C not in CATEGORY_COUNTS:
            raise ValueError(f"category count must be one of {CATEGORY_COUNTS}, got {self.C}")
        if not 1 <= self.value <= self.C:
            raise ValueError(f"label must be in [1, {self.C}], got {self.value}")


@dataclass(frozen=True)
class LabeledExample:
    logits: np.ndarray  # float32, length 400
    label: CategoryLabel
    runner_id: str
    rp_id: int
    context_mode: str


@dataclass
class DatasetSlice:
    """Labeled examples for one recording point (or a union of several)."""

    rp_id: int | str  # an RP id, or "union"
    examples: list[LabeledExample]
    C: int

    def __post_init__(self):
        seen = set()
        for ex in self.examples:
            if ex.label.C != self.C:
                raise ValueError(
                    f"example for runner {ex.runner_id!r} has C={ex.label.C}, slice has C={self.C}"
                )
            key = (ex.runner_id, ex.rp_id, ex.context_mode)
            if key in seen:
                raise ValueError(f"duplicate example {key}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def X(self) -> np.ndarray:
        if not self.examples:
            return np.zeros((0, LOGITS_DIM), dtype=np.float32)
        return np.stack([ex.logits for ex in self.examples]).astype(np.float32)

    @property
    def y(self) -> np.ndarray:
        return np.array([ex.label.value for ex in self.examples], dtype=np.int64)

    def class_counts(self) -> dict[int, int]:
        counts = {c: 0 for c in range(1, self.C + 1)}
        for ex in self.examples:
            counts[ex.label.value] += 1
        return counts


def concat_slices(slices: list[DatasetSlice]) -> DatasetSlice:
    """Union of per-RP slices into one dataset."""
    if not slices:
        raise ValueError("nothing to concatenate")
    C = slices[0].C
    examples = [ex for s in slices for ex in s.examples]
    return DatasetSlice(rp_id="union", examples=examples, C=C)


def discretize(times, C: int) -> dict[str, CategoryLabel]:
    """Map (runner_id, split_time) pairs at one RP to performance categories.

    Runners are sorted ascending by (split_time, runner_id); 0-based rank r
    gets label floor(r * C / n) + 1.
    """
    if C not in CATEGORY_COUNTS:
        raise ValueError(f"category count must be one of {CATEGORY_COUNTS}, got {C}")
    pairs = [(str(rid), float(t)) for rid, t in times]
    n = len(pairs)
    if n < C:
        raise ValueError(f"need at least {C} runners to form {C} categories, got {n}")
    seen = set()
    for rid, t in pairs:
        if t <= 0:
            raise ValueError(f"split time must be positive, got {t} for runner {rid!r}")
        if rid in seen:
            raise ValueError(f"duplicate runner {rid!r}")
        seen.add(rid)
    order = sorted(pairs, key=lambda p: (p[1], p[0]))
    return {rid: CategoryLabel(r * C // n + 1, C) for r, (rid, _) in enumerate(order)}


def _split_index(splits: list[SplitRecord]) -> dict[int, dict[str, float]]:
    by_rp: dict[int, dict[str, float]] = {}
    for s in splits:
        by_rp.setdefault(s.rp_id, {})[s.runner_id] = s.split_time
    return by_rp


def _records_at(records: list[ClipRecord], rp_id: int, mode: str) -> list[ClipRecord]:
    if mode not in CONTEXT_MODES:
        raise ValueError(f"context mode must be one of {CONTEXT_MODES}, got {mode!r}")
    return [r for r in records if r.rp_id == rp_id and r.context_mode == mode]


def build_current(
    records: list[ClipRecord],
    splits: list[SplitRecord],
    rp_id: int,
    mode: str,
    C: int,
) -> DatasetSlice:
    """Examples whose label is the runner's category at the same RP."""
    at_rp = _records_at(records, rp_id, mode)
    times_at_rp = _split_index(splits).get(rp_id, {})
    missing = [r.runner_id for r in at_rp if r.runner_id not in times_at_rp]
    if missing:
        raise DataError(
            f"no split time at RP {rp_id} for runner {missing[0]!r} "
            f"({len(missing)} runner(s) affected)"
        )
    labels = discretize([(r.runner_id, times_at_rp[r.runner_id]) for r in at_rp], C)
    examples = [
        LabeledExample(r.logits, labels[r.runner_id], r.runner_id, r.rp_id, r.context_mode)
        for r in at_rp
    ]
    return DatasetSlice(rp_id=rp_id, examples=examples, C=C)


def next_rp_id(splits: list[SplitRecord], rp_id: int) -> int:
    """The recording point that follows ``rp_id`` in the split data."""
    rps = sorted({s.rp_id for s in splits})
    later = [r for r in rps if r > rp_id]
    if not later:
        raise DataError(f"next RP unavailable after RP {rp_id} (known RPs: {rps})")
    return later[0]


def build_next(
    records: list[ClipRecord],
    splits: list[SplitRecord],
    rp_id: int,
    mode: str,
    C: int,
) -> DatasetSlice:
    """Examples pairing clips at this RP with categories at the following RP.

    Runners absent at the next RP are dropped; categories are computed over
    the surviving intersection.
    """
    nxt = next_rp_id(splits, rp_id)
    at_rp = _records_at(records, rp_id, mode)
    times_next = _split_index(splits).get(nxt, {})
    shared = [r for r in at_rp if r.runner_id in times_next]
    if not shared:
        raise DataError(
            f"no runner with a clip at RP {rp_id} also has a split time at RP {nxt}"
        )
    labels = discretize([(r.runner_id, times_next[r.runner_id]) for r in shared], C)
    examples = [
        LabeledExample(r.logits, labels[r.runner_id], r.runner_id, r.rp_id, r.context_mode)
        for r in shared
    ]
    return DatasetSlice(rp_id=rp_id, examples=examples, C=C)


def save_dataset(path, dataset: DatasetSlice) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in dataset.examples:
            row = {
                "runner": ex.runner_id,
                "rp": ex.rp_id,
                "mode": ex.context_mode,
                "label": ex.label.value,
                "C": ex.label.C,
                "logits": [_format_sig9(float(v)) for v in ex.logits],
            }
            fh.write(json.dumps(row, separators=(",", ":")) + "\n")


def load_dataset(path) -> DatasetSlice:
    path = Path(path)
    examples: list[LabeledExample] = []
    C = None
    rp_ids = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                label = CategoryLabel(int(row["label"]), int(row["C"]))
                ex = LabeledExample(
                    logits=np.asarray(row["logits"], dtype=np.float32),
                    label=label,
                    runner_id=str(row["runner"]),
                    rp_id=int(row["rp"]),
                    context_mode=str(row["mode"]),
                )
            except KeyError as exc:
                raise DataError(f"{path}:{lineno}: missing field {exc}") from exc
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if ex.logits.shape != (LOGITS_DIM,):
                raise DataError(
                    f"{path}:{lineno}: logits must have {LOGITS_DIM} entries, "
                    f"got {ex.logits.shape[0]}"
                )
            if not np.all(np.isfinite(ex.logits)):
                raise DataError(f"{path}:{lineno}: logits contain non-finite values")
            if C is None:
                C = label.C
            elif label.C != C:
                raise DataError(f"{path}:{lineno}: mixed C values ({label.C} vs {C})")
            examples.append(ex)
            rp_ids.add(ex.rp_id)
    if not examples:
        raise DataError(f"{path}: no examples")
    rp: int | str = rp_ids.pop() if len(rp_ids) == 1 else "union"
    try:
        return DatasetSlice(rp_id=rp, examples=examples, C=C)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
