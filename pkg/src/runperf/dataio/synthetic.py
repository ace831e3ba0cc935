"""Seeded synthetic datasets: the desk-scale stand-in for real race footage.

The generator fabricates a coherent bundle per seed: per-frame detections on
constant-velocity paths, clip embeddings whose class-conditional means are
``class_separation`` apart, and split times laid out so that quantile
labelling recovers the generating class exactly at every recording point.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .formats import save_detections, save_embeddings, save_rpinfo, save_split_times
from .types import CONTEXT_MODES, LOGITS_DIM, ClipRecord, Detection, RPInfo, SplitRecord


@dataclass
class SynthConfig:
    n_runners: int = 16
    categories: int = 2
    rp_ids: tuple[int, ...] = (3, 4, 5)
    class_separation: float = 4.0          # gap between class logit means, in noise sigmas
    logit_noise: float = 1.0
    mode_scales: dict[str, float] = field(
        default_factory=lambda: {"raw": 1.0, "bb": 0.6, "vibe": 0.5}
    )
    # detection stream
    n_tracks: int = 2
    n_frames: int = 175                    # 7 s at 25 fps
    frame_width: int = 1920
    frame_height: int = 1080
    feature_dim: int = 128
    detection_noise: float = 1.0           # px jitter on detected centers
    appearance_noise: float = 0.02
    dropout: tuple[int, int, int] | None = None  # (track, first frame, length)
    # split-time layout
    base_time: float = 28000.0             # seconds at the first RP for the fastest class
    rp_base_step: float = 1800.0
    leg_scale: float = 3600.0

    def validate(self) -> None:
        if self.categories not in (2, 3, 4):
            raise ValueError(f"categories must be 2, 3, or 4, got {self.categories}")
        if self.n_runners < self.categories:
            raise ValueError(
                f"n_runners must be >= categories, got {self.n_runners} < {self.categories}"
            )
        if self.n_tracks < 1 or self.n_frames < 1:
            raise ValueError("n_tracks and n_frames must be positive")
        for mode in self.mode_scales:
            if mode not in CONTEXT_MODES:
                raise ValueError(f"unknown context mode {mode!r} in mode_scales")
        if self.dropout is not None:
            track, start, length = self.dropout
            if not (0 <= track < self.n_tracks) or start < 0 or length < 1:
                raise ValueError(f"invalid dropout spec {self.dropout}")


@dataclass
class SyntheticDataset:
    frames: list[list[Detection]]          # detections per frame index
    frame_track_ids: list[list[int]]       # ground-truth track per detection, parallel
    clips: list[ClipRecord]
    splits: list[SplitRecord]
    labels: dict[tuple[str, int], int]     # (runner_id, rp_id) -> category
    rp_infos: list[RPInfo]
    config: SynthConfig
    seed: int

    def write(self, out_dir) -> dict[str, str]:
        """Write all dataset files under ``out_dir``; returns path -> sha256."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        flat = [det for per_frame in self.frames for det in per_frame]
        save_detections(out / "detections.jsonl", flat)
        save_embeddings(out / "embeddings.jsonl", self.clips)
        save_split_times(out / "splits.csv", self.splits)
        save_rpinfo(out / "rpinfo.csv", self.rp_infos)
        truth = {
            "labels": {f"{r}:{rp}": c for (r, rp), c in sorted(self.labels.items())},
            "track_ids": self.frame_track_ids,
        }
        (out / "truth.json").write_text(
            json.dumps(truth, sort_keys=True, separators=(",", ":")) + "\n",
            encoding="utf-8",
        )
        manifest = {}
        for name in ("detections.jsonl", "embeddings.jsonl", "splits.csv", "rpinfo.csv", "truth.json"):
            digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
            manifest[str(out / name)] = digest
        return manifest


def _runner_ids(n: int) -> list[str]:
    width = max(3, len(str(n)))
    return [f"r{i + 1:0{width}d}" for i in range(n)]


def generate_synthetic(config: SynthConfig, seed: int) -> SyntheticDataset:
    """Build one fully seeded dataset bundle.

    Runner ``i`` (0-based) belongs to category ``i * C // n + 1``, the same
    block rule quantile labelling uses, so labels are recoverable exactly.
    Leg durations per category live in disjoint ranges, which keeps the
    per-RP time ordering aligned with the category blocks.
    """
    config.validate()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))

    n = config.n_runners
    C = config.categories
    runners = _runner_ids(n)
    classes = [(i * C) // n + 1 for i in range(n)]

    # split times: cumulative class-banded legs on top of a shared RP offset
    splits: list[SplitRecord] = []
    labels: dict[tuple[str, int], int] = {}
    leg_totals = np.zeros(n)
    for m, rp in enumerate(config.rp_ids):
        for i, runner in enumerate(runners):
            c = classes[i]
            u = rng.random()
            leg_totals[i] += config.leg_scale * ((c - 1) + 0.1 + 0.8 * u)
            t = config.base_time + m * config.rp_base_step + leg_totals[i]
            splits.append(SplitRecord(runner_id=runner, rp_id=rp, split_time=float(t)))
            labels[(runner, rp)] = c

    # clip embeddings: one per runner x RP x mode, class mean on axis c-1
    clips: list[ClipRecord] = []
    for i, runner in enumerate(runners):
        c = classes[i]
        for rp in config.rp_ids:
            for mode in CONTEXT_MODES:
                scale = config.mode_scales.get(mode, 1.0)
                vec = rng.normal(0.0, config.logit_noise, LOGITS_DIM)
                vec[c - 1] += config.class_separation * scale
                clips.append(
                    ClipRecord(
                        runner_id=runner,
                        rp_id=rp,
                        context_mode=mode,
                        logits=vec.astype(np.float32),
                    )
                )

    # detection stream: constant-velocity tracks that cross mid-sequence
    frames: list[list[Detection]] = [[] for _ in range(config.n_frames)]
    frame_track_ids: list[list[int]] = [[] for _ in range(config.n_frames)]
    margin = 0.15 * config.frame_width
    span = config.frame_width - 2 * margin
    starts = []
    vels = []
    sizes = []
    for j in range(config.n_tracks):
        left_to_right = j % 2 == 0
        x0 = margin if left_to_right else config.frame_width - margin
        vx = (span / config.n_frames) * (1.0 if left_to_right else -1.0)
        y0 = config.frame_height * (0.45 + 0.02 * j)
        starts.append((x0, y0))
        vels.append((vx, 0.0))
        sizes.append((40.0 + 4.0 * j, 90.0 + 6.0 * j))

    basis = np.eye(config.feature_dim)
    for frame_idx in range(config.n_frames):
        for j in range(config.n_tracks):
            jitter = rng.normal(0.0, config.detection_noise, 2)
            feat_noise = rng.normal(0.0, config.appearance_noise, config.feature_dim)
            conf = 0.9 + 0.1 * rng.random()
            if config.dropout is not None:
                track, start, length = config.dropout
                if j == track and start <= frame_idx < start + length:
                    continue  # rng is consumed above regardless, keeping draws aligned
            cx = starts[j][0] + vels[j][0] * frame_idx + jitter[0]
            cy = starts[j][1] + vels[j][1] * frame_idx + jitter[1]
            feat = basis[j % config.feature_dim] + feat_noise
            feat = feat / np.linalg.norm(feat)
            det = Detection(
                frame_index=frame_idx,
                bbox=np.array([cx, cy, sizes[j][0], sizes[j][1]]),
                confidence=float(conf),
                feature=feat,
            )
            frames[frame_idx].append(det)
            frame_track_ids[frame_idx].append(j)

    rp_infos = [
        RPInfo(
            rp_id=rp,
            km=80.0 + 15.0 * m,
            start_rec_time=f"{7 + m:02d}:30",
            annotated_runners=n,
            footage_frames=config.n_frames * n,
        )
        for m, rp in enumerate(config.rp_ids)
    ]

    return SyntheticDataset(
        frames=frames,
        frame_track_ids=frame_track_ids,
        clips=clips,
        splits=splits,
        labels=labels,
        rp_infos=rp_infos,
        config=config,
        seed=seed,
    )
