"""Command-line pipeline driver.

Subcommands cover the pipeline end to end: ``synth`` writes a synthetic
dataset, ``track`` runs the tracker over detections, ``dataset`` assembles
labeled examples from embeddings and split times, ``eval`` runs the
cross-validation protocol, ``ablate`` fills the full task x categories x
context-mode table, and ``report`` re-renders artifacts from a saved
report.json.

A ``--config`` file holds ``key = value`` lines (values parse as JSON when
possible); command-line flags win over config values.  All randomness flows
from ``--seed``.  With ``--json``, progress is emitted as one JSON object
per line on stdout.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from .dataio.formats import (
    _format_sig9,
    group_by_frame,
    load_detections,
    load_embeddings,
    load_split_times,
)
from .dataio.synthetic import SynthConfig, generate_synthetic
from .dataio.types import CONTEXT_MODES, DataError
from .evalharness.ablation import ablation_csv, ablation_table
from .evalharness.plots import save_confusion_svg, save_roc_svg
from .evalharness.protocol import ProtocolConfig, run_protocol
from .perf import (
    DatasetSlice,
    build_current,
    build_next,
    concat_slices,
    load_dataset,
    next_rp_id,
    save_dataset,
)
from .tracker.backup import ConstantVelocityBackup
from .tracker.engine import TrackerConfig, run_sequence


class EventLog:
    """Progress sink: human-readable lines, or JSON objects with --json."""

    def __init__(self, as_json: bool):
        self.as_json = as_json

    def event(self, kind: str, message: str, **fields) -> None:
        if self.as_json:
            print(json.dumps({"event": kind, **fields}, sort_keys=True))
        else:
            print(message)

    def wrote(self, path) -> None:
        digest = _sha256(path)
        self.event("wrote", f"wrote {path}  sha256={digest}", path=str(path), sha256=digest)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def load_config_file(path) -> dict:
    """Flat ``key = value`` pairs; values parse as JSON, else raw strings."""
    cfg: dict = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise DataError(f"{path}:{lineno}: empty key")
        try:
            cfg[key] = json.loads(value)
        except json.JSONDecodeError:
            cfg[key] = value
    return cfg


def _resolve(args, cfg: dict, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return cfg.get(key, default)


def _require(args, cfg: dict, key: str):
    value = _resolve(args, cfg, key)
    if value is None:
        raise DataError(f"missing required option --{key.replace('_', '-')}")
    return value


def _parse_rp(value) -> int | str:
    if value is None or value == "union":
        return "union"
    return int(value)


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

_SYNTH_KEYS = set(SynthConfig.__dataclass_fields__)


def cmd_synth(args, cfg: dict, log: EventLog) -> int:
    out = Path(_require(args, cfg, "out"))
    seed = int(_resolve(args, cfg, "seed", 0))
    kwargs = {k: v for k, v in cfg.items() if k in _SYNTH_KEYS}
    if args.runners is not None:
        kwargs["n_runners"] = args.runners
    if args.categories is not None:
        kwargs["categories"] = args.categories
    for key in ("rp_ids", "dropout"):
        if key in kwargs and kwargs[key] is not None:
            kwargs[key] = tuple(kwargs[key])
    config = SynthConfig(**kwargs)
    dataset = generate_synthetic(config, seed)
    out.mkdir(parents=True, exist_ok=True)
    manifest = dataset.write(out)

    # reload through the public loaders so a nonzero exit means unusable files
    load_embeddings(out / "embeddings.jsonl")
    load_split_times(out / "splits.csv")
    load_detections(out / "detections.jsonl")
    for path in sorted(manifest):
        log.wrote(path)
    return 0


# ---------------------------------------------------------------------------
# track
# ---------------------------------------------------------------------------

_TRACKER_KEYS = ("max_age", "n_init", "gallery_size", "gate_threshold",
                 "motion_weight", "backup_noise_scale")


def _parse_bbox(text: str) -> tuple[float, float, float, float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != 4:
        raise DataError(f"seed bbox needs 4 numbers (cx,cy,w,h), got {text!r}")
    cx, cy, w, h = (float(p) for p in parts)
    if w <= 0 or h <= 0:
        raise DataError(f"seed bbox width/height must be positive, got w={w}, h={h}")
    return cx, cy, w, h


def _emission_row(emission) -> str:
    return json.dumps(
        {
            "frame": emission.frame_index,
            "id": emission.track_id,
            "bbox": [_format_sig9(v) for v in emission.bbox],
            "source": emission.source,
        },
        separators=(",", ":"),
    )


def cmd_track(args, cfg: dict, log: EventLog) -> int:
    detections_path = _require(args, cfg, "detections")
    seed_bbox = _parse_bbox(str(_require(args, cfg, "seed_bbox")))
    out = Path(_require(args, cfg, "out"))

    detections = load_detections(detections_path)
    if not detections:
        raise DataError(f"{detections_path}: no detections to track")
    frames = {i: dets for i, dets in enumerate(group_by_frame(detections))}

    tracker_kwargs = {k: cfg[k] for k in _TRACKER_KEYS if k in cfg}
    backup = ConstantVelocityBackup(min_iou=float(cfg.get("backup_min_iou", 0.1)))
    tracker, emissions = run_sequence(
        frames, TrackerConfig(**tracker_kwargs), roi_seed_bbox=seed_bbox, backup=backup
    )
    if tracker.roi_id is None:
        raise DataError("no confirmed track overlaps the seed bbox")

    out.mkdir(parents=True, exist_ok=True)
    roi_path = out / "tracks.jsonl"
    with open(roi_path, "w", encoding="utf-8") as fh:
        for emission in emissions:
            if emission.track_id == tracker.roi_id:
                fh.write(_emission_row(emission) + "\n")
    all_path = out / "all_tracks.jsonl"
    with open(all_path, "w", encoding="utf-8") as fh:
        for emission in emissions:
            fh.write(_emission_row(emission) + "\n")

    log.event(
        "tracked",
        f"runner of interest: track {tracker.roi_id} "
        f"({len(tracker.all_tracks)} tracks total)",
        roi_id=tracker.roi_id,
        n_tracks=len(tracker.all_tracks),
    )
    log.wrote(roi_path)
    log.wrote(all_path)
    return 0


# ---------------------------------------------------------------------------
# dataset / eval / ablate
# ---------------------------------------------------------------------------

def _build_slice(records, splits, rp_spec, mode: str, task: str, C: int) -> DatasetSlice:
    if rp_spec != "union":
        builder = build_current if task == "current" else build_next
        return builder(records, splits, int(rp_spec), mode, C)
    rps = sorted({r.rp_id for r in records if r.context_mode == mode})
    if not rps:
        raise DataError(f"no embeddings with context mode {mode!r}")
    slices = []
    for rp in rps:
        if task == "current":
            slices.append(build_current(records, splits, rp, mode, C))
        else:
            try:
                next_rp_id(splits, rp)
            except DataError:
                continue  # last RP has no successor
            slices.append(build_next(records, splits, rp, mode, C))
    if not slices:
        raise DataError(f"next RP unavailable for every RP in {rps}")
    return concat_slices(slices)


def _slice_rp_ids(data: DatasetSlice) -> tuple:
    return tuple(sorted({ex.rp_id for ex in data.examples}))


def cmd_dataset(args, cfg: dict, log: EventLog) -> int:
    records = load_embeddings(_require(args, cfg, "embeddings"))
    splits = load_split_times(_require(args, cfg, "splits"))
    rp_spec = _parse_rp(_resolve(args, cfg, "rp"))
    mode = str(_resolve(args, cfg, "mode", "raw"))
    task = str(_resolve(args, cfg, "task", "current"))
    C = int(_resolve(args, cfg, "categories", 2))
    out = Path(_require(args, cfg, "out"))

    data = _build_slice(records, splits, rp_spec, mode, task, C)
    if out.is_dir():
        out = out / "dataset.jsonl"
    out.parent.mkdir(parents=True, exist_ok=True)
    save_dataset(out, data)
    load_dataset(out)  # validate the round trip before declaring success
    log.event(
        "dataset",
        f"{len(data)} examples, C={C}, task={task}, mode={mode}",
        examples=len(data),
        C=C,
        task=task,
        mode=mode,
    )
    log.wrote(out)
    return 0


def _protocol_config(args, cfg: dict, C: int, task: str, mode: str, rp_ids: tuple) -> ProtocolConfig:
    params = _resolve(args, cfg, "classifier_params", {})
    if isinstance(params, str):
        params = json.loads(params)
    return ProtocolConfig(
        iterations=int(_resolve(args, cfg, "iterations", 100)),
        folds=int(_resolve(args, cfg, "folds", 4)),
        master_seed=int(_resolve(args, cfg, "seed", 0)),
        classifier=str(_resolve(args, cfg, "classifier", "logistic_regression")),
        classifier_params=params,
        C=C,
        task=task,
        rp_ids=rp_ids,
        context_mode=mode,
        std_mode=str(_resolve(args, cfg, "std_mode", "population")),
    )


def _write_confusion_csv(confusion, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in confusion:
            fh.write(",".join(str(int(v)) for v in row) + "\n")


def _write_roc_csv(roc: dict, path) -> None:
    # the stored curve is one-vs-rest for the slowest category
    target = max(roc["curves"], key=lambda c: c["positive_label"])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("fpr,tpr,threshold\n")
        for fpr, tpr, thr in zip(target["fpr"], target["tpr"], target["thresholds"]):
            thr_text = "inf" if thr is None else repr(float(thr))
            fh.write(f"{fpr!r},{tpr!r},{thr_text}\n")


def _emit_report_artifacts(report_dict: dict, out: Path, plots: bool, log: EventLog) -> None:
    confusion_path = out / "confusion.csv"
    _write_confusion_csv(report_dict["confusion"], confusion_path)
    log.wrote(confusion_path)
    roc_path = out / "roc.csv"
    _write_roc_csv(report_dict["roc"], roc_path)
    log.wrote(roc_path)
    if plots:
        roc_svg = out / "roc.svg"
        save_roc_svg(report_dict["roc"], roc_svg)
        log.wrote(roc_svg)
        confusion_svg = out / "confusion.svg"
        save_confusion_svg(report_dict["confusion"], confusion_svg)
        log.wrote(confusion_svg)


def cmd_eval(args, cfg: dict, log: EventLog) -> int:
    dataset_path = _resolve(args, cfg, "dataset")
    mode = str(_resolve(args, cfg, "mode", "raw"))
    task = str(_resolve(args, cfg, "task", "current"))
    if dataset_path is not None:
        data = load_dataset(dataset_path)
        C = data.C
    else:
        records = load_embeddings(_require(args, cfg, "embeddings"))
        splits = load_split_times(_require(args, cfg, "splits"))
        rp_spec = _parse_rp(_resolve(args, cfg, "rp"))
        C = int(_resolve(args, cfg, "categories", 2))
        data = _build_slice(records, splits, rp_spec, mode, task, C)
    out = Path(_require(args, cfg, "out"))

    config = _protocol_config(args, cfg, C, task, mode, _slice_rp_ids(data))
    workers = _resolve(args, cfg, "workers")
    report = run_protocol(data, config, workers=None if workers is None else int(workers))

    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    report_path.write_text(report.to_json() + "\n", encoding="utf-8")
    log.wrote(report_path)
    _emit_report_artifacts(report.to_dict(), out, bool(args.plots), log)
    log.event(
        "summary",
        f"accuracy {report.accuracy_mean:.1f} ± {report.accuracy_std:.1f} "
        f"(pooled {report.pooled_accuracy:.1f}, auc {report.roc['auc']:.3f})",
        accuracy_mean=report.accuracy_mean,
        accuracy_std=report.accuracy_std,
        pooled_accuracy=report.pooled_accuracy,
        auc=report.roc["auc"],
    )
    return 0


def cmd_ablate(args, cfg: dict, log: EventLog) -> int:
    records = load_embeddings(_require(args, cfg, "embeddings"))
    splits = load_split_times(_require(args, cfg, "splits"))
    rp_spec = _parse_rp(_resolve(args, cfg, "rp"))
    out = Path(_require(args, cfg, "out"))

    datasets = {}
    for task in ("current", "next"):
        for C in (2, 3, 4):
            for mode in CONTEXT_MODES:
                try:
                    datasets[(task, C, mode)] = _build_slice(
                        records, splits, rp_spec, mode, task, C
                    )
                except (DataError, ValueError):
                    datasets[(task, C, mode)] = None

    config = _protocol_config(args, cfg, C=2, task="current", mode="raw", rp_ids=())
    workers = _resolve(args, cfg, "workers")
    rows, _ = ablation_table(datasets, config, workers=None if workers is None else int(workers))

    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "ablation.csv"
    csv_path.write_text(ablation_csv(rows), encoding="utf-8")
    log.wrote(csv_path)
    json_path = out / "ablation.json"
    json_path.write_text(
        json.dumps(
            [
                {
                    "task": r.task,
                    "C": r.C,
                    "mode": r.mode,
                    "cell": r.cell,
                    "mean": r.mean,
                    "std": r.std,
                }
                for r in rows
            ],
            sort_keys=True,
            separators=(",", ":"),
        )
        + "\n",
        encoding="utf-8",
    )
    log.wrote(json_path)
    for r in rows:
        log.event(
            "cell",
            f"{r.task} C={r.C} {r.mode}: {r.cell}",
            task=r.task,
            C=r.C,
            mode=r.mode,
            cell=r.cell,
        )
    return 0


def cmd_report(args, cfg: dict, log: EventLog) -> int:
    report_path = _require(args, cfg, "report")
    out = Path(_require(args, cfg, "out"))
    report_dict = json.loads(Path(report_path).read_text(encoding="utf-8"))
    for key in ("confusion", "roc", "accuracy_mean", "accuracy_std"):
        if key not in report_dict:
            raise DataError(f"{report_path}: not a protocol report (missing {key!r})")

    out.mkdir(parents=True, exist_ok=True)
    _emit_report_artifacts(report_dict, out, bool(args.plots), log)
    summary_path = out / "summary.txt"
    config_echo = json.dumps(report_dict.get("config", {}), sort_keys=True)
    summary_path.write_text(
        f"accuracy: {report_dict['accuracy_mean']:.1f} ± {report_dict['accuracy_std']:.1f}\n"
        f"pooled accuracy: {report_dict.get('pooled_accuracy', float('nan')):.1f}\n"
        f"auc: {report_dict['roc']['auc']:.4f}\n"
        f"config: {config_echo}\n",
        encoding="utf-8",
    )
    log.wrote(summary_path)
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags win")
    common.add_argument("--seed", type=int, help="master random seed (default 0)")
    common.add_argument("--out", help="output directory (or file for `dataset`)")
    common.add_argument("--json", action="store_true", help="emit JSON log lines on stdout")

    parser = argparse.ArgumentParser(
        prog="runperf",
        description="Runner tracking, performance categories, and the evaluation protocol.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--runners", type=int, help="number of runners")
    p.add_argument("--categories", type=int, help="category count C")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("track", parents=[common], help="run the tracker over detections")
    p.add_argument("--detections", help="detections.jsonl path")
    p.add_argument("--seed-bbox", dest="seed_bbox", help="runner-of-interest box 'cx,cy,w,h'")
    p.set_defaults(func=cmd_track)

    data_flags = argparse.ArgumentParser(add_help=False)
    data_flags.add_argument("--embeddings", help="embeddings.jsonl path")
    data_flags.add_argument("--splits", help="splits.csv path")
    data_flags.add_argument("--rp", help="recording point id, or 'union' (default)")
    data_flags.add_argument("--mode", choices=CONTEXT_MODES, help="context mode (default raw)")

    p = sub.add_parser("dataset", parents=[common, data_flags], help="assemble a labeled dataset")
    p.add_argument("--task", choices=("current", "next"), help="label task (default current)")
    p.add_argument("--categories", type=int, help="category count C (default 2)")
    p.set_defaults(func=cmd_dataset)

    proto_flags = argparse.ArgumentParser(add_help=False)
    proto_flags.add_argument("--iterations", type=int, help="protocol iterations (default 100)")
    proto_flags.add_argument("--folds", type=int, help="cross-validation folds (default 4)")
    proto_flags.add_argument("--classifier", help="model kind (default logistic_regression)")
    proto_flags.add_argument(
        "--classifier-params", dest="classifier_params", help="JSON hyperparameter object"
    )
    proto_flags.add_argument("--workers", type=int, help="parallel iteration threads")

    p = sub.add_parser("eval", parents=[common, data_flags, proto_flags],
                       help="run the evaluation protocol")
    p.add_argument("--dataset", help="prebuilt dataset.jsonl (skips --embeddings/--splits)")
    p.add_argument("--task", choices=("current", "next"), help="label task (default current)")
    p.add_argument("--categories", type=int, help="category count C (default 2)")
    p.add_argument("--plots", action="store_true", help="also write roc.svg / confusion.svg")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", parents=[common, data_flags, proto_flags],
                       help="evaluate every task x C x mode cell")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", parents=[common], help="re-render artifacts from report.json")
    p.add_argument("--report", help="existing report.json")
    p.add_argument("--plots", action="store_true", help="also write roc.svg / confusion.svg")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log = EventLog(as_json=bool(getattr(args, "json", False)))
    try:
        cfg = load_config_file(args.config) if args.config else {}
        return args.func(args, cfg, log)
    except (DataError, ValueError, OSError) as exc:
        if log.as_json:
            print(json.dumps({"event": "error", "message": str(exc)}, sort_keys=True))
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
