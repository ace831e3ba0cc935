"""On-disk formats: embeddings.jsonl, splits.csv, detections.jsonl, rpinfo.csv.

Embedding logits are canonically float32.  The text form writes each value
with 9 significant digits, which is exactly enough for a float32 to survive
a write/parse round trip bit for bit.  ``save_embeddings`` can additionally
emit a raw little-endian float32 sidecar (``<path>.f32``) for bulk data;
when present it is preferred at load time.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .types import (
    CONTEXT_MODES,
    LOGITS_DIM,
    ClipRecord,
    DataError,
    Detection,
    RPInfo,
    SplitRecord,
    normalize_feature,
)

SPLITS_HEADER = "runner,rp,seconds"
RPINFO_HEADER = "rp,km,start_rec_time,footage_frames,annotated_runners"


def _format_sig9(value: float) -> float:
    # float32 -> 9 significant decimal digits -> float64 -> float32 is lossless
    return float(f"{value:.9g}")


def sidecar_path(path) -> Path:
    return Path(str(path) + ".f32")


# ---------------------------------------------------------------------------
# embeddings.jsonl
# ---------------------------------------------------------------------------

def save_embeddings(path, records: list[ClipRecord], sidecar: bool = False) -> None:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            obj = {
                "runner": rec.runner_id,
                "rp": rec.rp_id,
                "mode": rec.context_mode,
                "logits": [_format_sig9(float(v)) for v in rec.logits],
            }
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
    if sidecar:
        block = np.concatenate([rec.logits for rec in records]) if records else np.empty(0, np.float32)
        sidecar_path(path).write_bytes(block.astype("<f4").tobytes())


def load_embeddings(path, sidecar: str | bool = "auto") -> list[ClipRecord]:
    """Parse an embeddings file into validated ClipRecords, in file order.

    ``sidecar`` controls the binary fast path: "auto" uses ``<path>.f32``
    when present, True requires it, False ignores it.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"embeddings file not found: {path}")

    side = sidecar_path(path)
    use_side = sidecar is True or (sidecar == "auto" and side.exists())
    if sidecar is True and not side.exists():
        raise DataError(f"binary sidecar not found: {side}")
    block = None
    if use_side:
        raw = np.frombuffer(side.read_bytes(), dtype="<f4")
        if raw.size % LOGITS_DIM != 0:
            raise DataError(
                f"sidecar {side} holds {raw.size} floats, not a multiple of {LOGITS_DIM}"
            )
        block = raw.reshape(-1, LOGITS_DIM)

    records: list[ClipRecord] = []
    seen: set[tuple[str, int, str]] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            for key in ("runner", "rp", "mode", "logits"):
                if key not in obj:
                    raise DataError(f"{path}:{lineno}: missing field {key!r}")
            if obj["mode"] not in CONTEXT_MODES:
                raise DataError(f"{path}:{lineno}: unknown mode {obj['mode']!r}")
            logits = obj["logits"]
            if not isinstance(logits, list) or len(logits) != LOGITS_DIM:
                got = len(logits) if isinstance(logits, list) else type(logits).__name__
                raise DataError(
                    f"{path}:{lineno}: logits must have exactly {LOGITS_DIM} entries, got {got}"
                )
            idx = len(records)
            if block is not None:
                if idx >= block.shape[0]:
                    raise DataError(f"sidecar {side} has fewer rows than {path}")
                vec = block[idx]
            else:
                vec = np.asarray(logits, dtype=np.float32)
            try:
                rec = ClipRecord(
                    runner_id=str(obj["runner"]),
                    rp_id=int(obj["rp"]),
                    context_mode=obj["mode"],
                    logits=vec,
                )
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if rec.key in seen:
                raise DataError(
                    f"{path}:{lineno}: duplicate (runner, rp, mode) key {rec.key}"
                )
            seen.add(rec.key)
            records.append(rec)
    if block is not None and block.shape[0] != len(records):
        raise DataError(
            f"sidecar {side} has {block.shape[0]} rows but {path} has {len(records)} records"
        )
    return records


# ---------------------------------------------------------------------------
# splits.csv
# ---------------------------------------------------------------------------

def save_split_times(path, records: list[SplitRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SPLITS_HEADER + "\n")
        for rec in records:
            fh.write(f"{rec.runner_id},{rec.rp_id},{rec.split_time!r}\n")


def load_split_times(path) -> list[SplitRecord]:
    """Parse splits.csv; split times must rise strictly with RP order per runner."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"splits file not found: {path}")
    records: list[SplitRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SPLITS_HEADER:
            raise DataError(f"{path}:1: expected header {SPLITS_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 3 fields, got {len(parts)}")
            runner, rp_s, sec_s = parts
            try:
                rp = int(rp_s)
                seconds = float(sec_s)
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            try:
                records.append(SplitRecord(runner_id=runner, rp_id=rp, split_time=seconds))
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc

    by_runner: dict[str, list[SplitRecord]] = {}
    for rec in records:
        by_runner.setdefault(rec.runner_id, []).append(rec)
    for runner, recs in by_runner.items():
        recs = sorted(recs, key=lambda r: r.rp_id)
        for prev, cur in zip(recs, recs[1:]):
            if cur.split_time <= prev.split_time:
                raise DataError(
                    f"split times for runner {runner!r} do not increase with RP order: "
                    f"RP{prev.rp_id}={prev.split_time} >= RP{cur.rp_id}={cur.split_time}"
                )
    return records


# ---------------------------------------------------------------------------
# detections.jsonl
# ---------------------------------------------------------------------------

def save_detections(path, detections: list[Detection]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for det in detections:
            obj = {
                "frame": det.frame_index,
                "bbox": [float(v) for v in det.bbox],
                "conf": float(det.confidence),
                "feat": [float(v) for v in det.feature],
            }
            fh.write(json.dumps(obj, separators=(",", ":")) + "\n")


def load_detections(path, feature_dim: int | None = None) -> list[Detection]:
    """Parse detections.jsonl; appearance features are unit-normalized on load.

    All records must share one feature dimension (``feature_dim`` if given,
    otherwise the first record's).
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"detections file not found: {path}")
    detections: list[Detection] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from exc
            for key in ("frame", "bbox", "conf", "feat"):
                if key not in obj:
                    raise DataError(f"{path}:{lineno}: missing field {key!r}")
            try:
                feat = normalize_feature(obj["feat"])
                det = Detection(
                    frame_index=int(obj["frame"]),
                    bbox=obj["bbox"],
                    confidence=float(obj["conf"]),
                    feature=feat,
                )
            except DataError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if feature_dim is None:
                feature_dim = det.feature.shape[0]
            elif det.feature.shape[0] != feature_dim:
                raise DataError(
                    f"{path}:{lineno}: feature has {det.feature.shape[0]} entries, "
                    f"expected {feature_dim}"
                )
            detections.append(det)
    return detections


def group_by_frame(detections: list[Detection]) -> list[list[Detection]]:
    """Bucket detections into consecutive per-frame lists, 0..max frame."""
    if not detections:
        return []
    n_frames = max(d.frame_index for d in detections) + 1
    frames: list[list[Detection]] = [[] for _ in range(n_frames)]
    for det in detections:
        frames[det.frame_index].append(det)
    return frames


# ---------------------------------------------------------------------------
# rpinfo.csv
# ---------------------------------------------------------------------------

def save_rpinfo(path, infos: list[RPInfo]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(RPINFO_HEADER + "\n")
        for info in infos:
            frames = "" if info.footage_frames is None else str(info.footage_frames)
            fh.write(
                f"{info.rp_id},{info.km!r},{info.start_rec_time},{frames},{info.annotated_runners}\n"
            )


def load_rpinfo(path) -> list[RPInfo]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"rpinfo file not found: {path}")
    infos: list[RPInfo] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RPINFO_HEADER:
            raise DataError(f"{path}:1: expected header {RPINFO_HEADER!r}, got {header!r}")
        for lineno, line in enumerate(fh, 2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 5:
                raise DataError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            rp_s, km_s, start, frames_s, annot_s = parts
            try:
                infos.append(
                    RPInfo(
                        rp_id=int(rp_s),
                        km=float(km_s),
                        start_rec_time=start,
                        footage_frames=int(frames_s) if frames_s else None,
                        annotated_runners=int(annot_s),
                    )
                )
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    ordered = sorted(infos, key=lambda i: i.rp_id)
    for prev, cur in zip(ordered, ordered[1:]):
        if cur.km <= prev.km:
            raise DataError(
                f"km must increase strictly with rp_id: RP{prev.rp_id}@{prev.km} vs "
                f"RP{cur.rp_id}@{cur.km}"
            )
    return infos
