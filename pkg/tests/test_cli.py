"""Command-line pipeline: synth, track, dataset, eval, ablate, report."""

import json

import numpy as np
import pytest

from runperf.cli import load_config_file, main


def run_cli(*argv):
    return main(list(argv))


def events_of(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.strip().splitlines() if line]


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synth")
    code = main(["synth", "--out", str(out), "--seed", "7", "--runners", "16"])
    assert code == 0
    return out


def test_synth_writes_complete_bundle(synth_dir):
    names = {p.name for p in synth_dir.iterdir()}
    assert names == {
        "detections.jsonl", "embeddings.jsonl", "splits.csv", "rpinfo.csv", "truth.json",
    }


def test_synth_emits_manifest_events(tmp_path, capsys):
    code = run_cli("synth", "--out", str(tmp_path / "d"), "--seed", "1",
                   "--runners", "8", "--json")
    assert code == 0
    wrote = [e for e in events_of(capsys) if e["event"] == "wrote"]
    assert len(wrote) == 5
    for e in wrote:
        assert len(e["sha256"]) == 64


def test_synth_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run_cli("synth", "--out", str(a), "--seed", "3", "--runners", "8") == 0
    assert run_cli("synth", "--out", str(b), "--seed", "3", "--runners", "8") == 0
    for name in ("embeddings.jsonl", "splits.csv", "detections.jsonl"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_synth_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "synth.cfg"
    cfg.write_text("n_runners = 8\nclass_separation = 2.5\n# comment\n")
    out = tmp_path / "d"
    code = run_cli("synth", "--config", str(cfg), "--out", str(out),
                   "--runners", "6", "--seed", "0", "--json")
    assert code == 0
    emb = (out / "embeddings.jsonl").read_text().strip().splitlines()
    runners = {json.loads(line)["runner"] for line in emb}
    assert len(runners) == 6  # the flag wins over the config value


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text('alpha = 1.5\nname = plain text\nflags = [1, 2]\n')
    parsed = load_config_file(cfg)
    assert parsed == {"alpha": 1.5, "name": "plain text", "flags": [1, 2]}


def test_config_file_rejects_garbage(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("just some words\n")
    with pytest.raises(ValueError, match=r":1:"):
        load_config_file(cfg)


def seed_bbox_of(synth_dir):
    first = json.loads((synth_dir / "detections.jsonl").read_text().splitlines()[0])
    cx, cy, w, h = first["bbox"]
    return f"{cx:.1f},{cy:.1f},{w:.1f},{h:.1f}"


def test_track_writes_roi_and_all_tracks(synth_dir, tmp_path, capsys):
    out = tmp_path / "trk"
    code = run_cli("track", "--detections", str(synth_dir / "detections.jsonl"),
                   "--seed-bbox", seed_bbox_of(synth_dir), "--out", str(out), "--json")
    assert code == 0
    events = events_of(capsys)
    tracked = next(e for e in events if e["event"] == "tracked")
    assert tracked["roi_id"] >= 1
    roi_rows = [json.loads(l) for l in (out / "tracks.jsonl").read_text().splitlines()]
    assert {r["id"] for r in roi_rows} == {tracked["roi_id"]}
    all_rows = [json.loads(l) for l in (out / "all_tracks.jsonl").read_text().splitlines()]
    assert len(all_rows) > len(roi_rows)
    sample = roi_rows[0]
    assert set(sample) == {"frame", "id", "bbox", "source"}


def test_track_dropout_emits_backup_rows(tmp_path):
    synth = tmp_path / "s"
    cfg = tmp_path / "cfg"
    cfg.write_text("dropout = [0, 80, 10]\nn_runners = 8\n")
    assert run_cli("synth", "--config", str(cfg), "--out", str(synth), "--seed", "7") == 0
    out = tmp_path / "t"
    code = run_cli("track", "--detections", str(synth / "detections.jsonl"),
                   "--seed-bbox", seed_bbox_of(synth), "--out", str(out))
    assert code == 0
    rows = [json.loads(l) for l in (out / "tracks.jsonl").read_text().splitlines()]
    backup_frames = [r["frame"] for r in rows if r["source"] == "backup"]
    assert backup_frames == list(range(80, 90))
    assert len({r["id"] for r in rows}) == 1


def test_track_requires_detections(tmp_path, capsys):
    empty = tmp_path / "empty.jsonl"
    empty.write_text("")
    code = run_cli("track", "--detections", str(empty),
                   "--seed-bbox", "100,100,40,90", "--out", str(tmp_path / "o"))
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_track_rejects_bad_seed_bbox(synth_dir, tmp_path):
    code = run_cli("track", "--detections", str(synth_dir / "detections.jsonl"),
                   "--seed-bbox", "1,2,3", "--out", str(tmp_path / "o"))
    assert code == 1


def test_dataset_then_eval_round_trip(synth_dir, tmp_path, capsys):
    ds_path = tmp_path / "ds.jsonl"
    code = run_cli("dataset", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"),
                   "--rp", "3", "--mode", "raw", "--task", "current",
                   "--categories", "2", "--out", str(ds_path))
    assert code == 0
    capsys.readouterr()  # drop the dataset command's human-readable lines
    out = tmp_path / "eval"
    code = run_cli("eval", "--dataset", str(ds_path), "--iterations", "4",
                   "--folds", "4", "--seed", "5", "--out", str(out), "--json")
    assert code == 0
    events = events_of(capsys)
    summary = next(e for e in events if e["event"] == "summary")
    assert 0.0 <= summary["accuracy_mean"] <= 100.0
    report = json.loads((out / "report.json").read_text())
    assert set(report) >= {"config", "accuracy_mean", "accuracy_std", "confusion", "roc"}
    assert (out / "confusion.csv").exists()
    assert (out / "roc.csv").exists()


def test_eval_direct_from_embeddings(synth_dir, tmp_path):
    out = tmp_path / "eval"
    code = run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "union",
                   "--iterations", "2", "--folds", "4", "--out", str(out))
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["rp_ids"] == [3, 4, 5]


def test_eval_next_task_beyond_last_rp_fails(synth_dir, tmp_path, capsys):
    code = run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "5",
                   "--task", "next", "--iterations", "2", "--out", str(tmp_path / "o"))
    assert code == 1
    assert "next RP unavailable" in capsys.readouterr().err


def test_eval_report_is_canonical_json(synth_dir, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        code = run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                       "--splits", str(synth_dir / "splits.csv"), "--rp", "3",
                       "--iterations", "3", "--folds", "4", "--seed", "9",
                       "--out", str(out))
        assert code == 0
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()


def test_eval_plots_flag_writes_svgs(synth_dir, tmp_path):
    out = tmp_path / "eval"
    code = run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "3",
                   "--iterations", "2", "--folds", "4", "--out", str(out), "--plots")
    assert code == 0
    assert (out / "roc.svg").exists()
    assert (out / "confusion.svg").exists()


def test_roc_csv_serializes_inf_threshold(synth_dir, tmp_path):
    out = tmp_path / "eval"
    assert run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "3",
                   "--iterations", "2", "--folds", "4", "--out", str(out)) == 0
    lines = (out / "roc.csv").read_text().strip().splitlines()
    assert lines[0] == "fpr,tpr,threshold"
    assert lines[1].endswith(",inf")


def test_ablate_emits_full_table(synth_dir, tmp_path, capsys):
    out = tmp_path / "abl"
    code = run_cli("ablate", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "union",
                   "--iterations", "2", "--folds", "4", "--out", str(out), "--json")
    assert code == 0
    lines = (out / "ablation.csv").read_text().strip().splitlines()
    assert len(lines) == 19
    table = json.loads((out / "ablation.json").read_text())
    assert len(table) == 18
    assert all(set(row) >= {"task", "C", "mode", "cell"} for row in table)
    cells = [e for e in events_of(capsys) if e["event"] == "cell"]
    assert len(cells) == 18


def test_report_regenerates_artifacts(synth_dir, tmp_path):
    eval_out = tmp_path / "eval"
    assert run_cli("eval", "--embeddings", str(synth_dir / "embeddings.jsonl"),
                   "--splits", str(synth_dir / "splits.csv"), "--rp", "3",
                   "--iterations", "2", "--folds", "4", "--out", str(eval_out)) == 0
    rep_out = tmp_path / "rep"
    code = run_cli("report", "--report", str(eval_out / "report.json"),
                   "--out", str(rep_out))
    assert code == 0
    assert (rep_out / "summary.txt").exists()
    assert (rep_out / "confusion.csv").read_bytes() == (eval_out / "confusion.csv").read_bytes()
    assert (rep_out / "roc.csv").read_bytes() == (eval_out / "roc.csv").read_bytes()


def test_report_rejects_foreign_json(tmp_path, capsys):
    bad = tmp_path / "report.json"
    bad.write_text('{"something": "else"}')
    code = run_cli("report", "--report", str(bad), "--out", str(tmp_path / "o"))
    assert code == 1


def test_missing_input_file_is_reported(tmp_path, capsys):
    code = run_cli("eval", "--dataset", str(tmp_path / "absent.jsonl"),
                   "--iterations", "2", "--out", str(tmp_path / "o"))
    assert code == 1
    err = capsys.readouterr().err
    assert "error:" in err
