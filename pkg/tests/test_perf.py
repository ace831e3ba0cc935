"""Quantile discretization and labeled dataset assembly."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from runperf.dataio import DataError, SplitRecord
from runperf.dataio.synthetic import SynthConfig, generate_synthetic
from runperf.perf import (
    CategoryLabel,
    DatasetSlice,
    build_current,
    build_next,
    concat_slices,
    discretize,
    load_dataset,
    next_rp_id,
    save_dataset,
)


def ids(n):
    return [f"r{i:03d}" for i in range(n)]


def labels_of(times, C):
    return {rid: lab.value for rid, lab in discretize(times, C).items()}


# unique positive times, enough runners for the largest category count
unique_times = st.lists(
    st.floats(min_value=0.1, max_value=1e6, allow_nan=False),
    min_size=4, max_size=60, unique=True,
)


def test_known_median_split():
    times = [("a", 10.0), ("b", 20.0), ("c", 30.0), ("d", 40.0)]
    assert labels_of(times, 2) == {"a": 1, "b": 1, "c": 2, "d": 2}


def test_known_quartiles_uneven():
    times = [(f"r{i}", float(i + 1)) for i in range(10)]
    got = labels_of(times, 4)
    counts = {c: sum(1 for v in got.values() if v == c) for c in (1, 2, 3, 4)}
    assert counts == {1: 3, 2: 2, 3: 3, 4: 2}
    assert got["r0"] == 1 and got["r9"] == 4


def test_faster_is_never_higher_label():
    times = [(f"r{i}", t) for i, t in enumerate([5.0, 3.0, 8.0, 1.0, 9.0, 7.0])]
    for C in (2, 3, 4):
        got = labels_of(times, C)
        ordered = sorted(times, key=lambda p: p[1])
        values = [got[rid] for rid, _ in ordered]
        assert values == sorted(values)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        discretize([("a", 1.0)], 2)
    with pytest.raises(ValueError):
        discretize([("a", 1.0), ("b", -2.0)], 2)
    with pytest.raises(ValueError):
        discretize([("a", 1.0), ("a", 2.0)], 2)
    with pytest.raises(ValueError):
        discretize([("a", 1.0), ("b", 2.0)], 5)


def test_equal_times_tie_break_by_runner_id():
    times = [("b", 1.0), ("a", 1.0), ("c", 2.0), ("d", 3.0)]
    assert labels_of(times, 2) == {"a": 1, "b": 1, "c": 2, "d": 2}


@settings(deadline=None)
@given(unique_times, st.sampled_from([2, 3, 4]))
def test_class_counts_differ_by_at_most_one(values, C):
    times = list(zip(ids(len(values)), values))
    got = labels_of(times, C)
    counts = [sum(1 for v in got.values() if v == c) for c in range(1, C + 1)]
    assert sum(counts) == len(values)
    assert max(counts) - min(counts) <= 1


@settings(deadline=None)
@given(unique_times, st.sampled_from([2, 3, 4]), st.randoms())
def test_permutation_invariance(values, C, rnd):
    times = list(zip(ids(len(values)), values))
    shuffled = times[:]
    rnd.shuffle(shuffled)
    assert labels_of(times, C) == labels_of(shuffled, C)


@settings(deadline=None)
@given(unique_times, st.sampled_from([2, 3, 4]),
       st.floats(min_value=0.01, max_value=100.0))
def test_positive_rescale_invariance(values, C, scale):
    times = list(zip(ids(len(values)), values))
    scaled = [(rid, t * scale) for rid, t in times]
    assert labels_of(times, C) == labels_of(scaled, C)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=25))
def test_coarsening_consistency_when_divisible(quarter):
    n = 4 * quarter
    rng = np.random.default_rng(quarter)
    values = rng.permutation(np.arange(1, n + 1)).astype(float)
    times = list(zip(ids(n), values))
    fine = labels_of(times, 4)
    coarse = labels_of(times, 2)
    for rid in fine:
        if fine[rid] == 1:
            assert coarse[rid] == 1
        if fine[rid] == 4:
            assert coarse[rid] == 2


def test_category_label_validation():
    with pytest.raises(ValueError):
        CategoryLabel(0, 2)
    with pytest.raises(ValueError):
        CategoryLabel(3, 2)
    with pytest.raises(ValueError):
        CategoryLabel(1, 9)


@pytest.fixture(scope="module")
def synth():
    return generate_synthetic(
        SynthConfig(n_runners=12, categories=2, rp_ids=(3, 4, 5)), seed=5
    )


def test_build_current_matches_truth(synth):
    for rp in (3, 4, 5):
        sl = build_current(synth.clips, synth.splits, rp_id=rp, mode="raw", C=2)
        assert len(sl) == 12
        for ex in sl.examples:
            assert ex.label.value == synth.labels[(ex.runner_id, rp)]


def test_build_current_missing_split(synth):
    splits = [s for s in synth.splits if s.runner_id != "r003"]
    with pytest.raises(DataError, match="r003"):
        build_current(synth.clips, splits, rp_id=3, mode="raw", C=2)


def test_next_rp_id_lookup(synth):
    assert next_rp_id(synth.splits, 3) == 4
    assert next_rp_id(synth.splits, 4) == 5
    with pytest.raises(DataError, match="next RP unavailable"):
        next_rp_id(synth.splits, 5)


def test_build_next_uses_following_rp_labels(synth):
    sl = build_next(synth.clips, synth.splits, rp_id=3, mode="raw", C=2)
    assert sl.rp_id == 3
    for ex in sl.examples:
        assert ex.label.value == synth.labels[(ex.runner_id, 4)]


def test_build_next_restricts_to_continuing_runners(synth):
    # drop one runner's final-RP split; the next-task slice at RP 4 loses them
    splits = [s for s in synth.splits if not (s.runner_id == "r002" and s.rp_id == 5)]
    sl = build_next(synth.clips, splits, rp_id=4, mode="raw", C=2)
    assert len(sl) == 11
    assert all(ex.runner_id != "r002" for ex in sl.examples)


def test_dataset_slice_properties(synth):
    sl = build_current(synth.clips, synth.splits, rp_id=3, mode="raw", C=2)
    assert sl.X.shape == (12, 400)
    assert sl.X.dtype == np.float32
    assert sl.y.shape == (12,)
    assert set(sl.class_counts()) == {1, 2}
    assert sum(sl.class_counts().values()) == 12


def test_concat_slices_union(synth):
    parts = [
        build_current(synth.clips, synth.splits, rp_id=rp, mode="raw", C=2)
        for rp in (3, 4)
    ]
    union = concat_slices(parts)
    assert union.rp_id == "union"
    assert len(union) == 24


def test_dataset_round_trip(tmp_path, synth):
    sl = build_current(synth.clips, synth.splits, rp_id=4, mode="bb", C=2)
    path = tmp_path / "ds.jsonl"
    save_dataset(path, sl)
    loaded = load_dataset(path)
    assert loaded.rp_id == 4
    assert loaded.C == 2
    np.testing.assert_array_equal(loaded.X, sl.X)
    np.testing.assert_array_equal(loaded.y, sl.y)


def test_load_dataset_rejects_mixed_categories(tmp_path, synth):
    a = build_current(synth.clips, synth.splits, rp_id=3, mode="raw", C=2)
    b = build_current(synth.clips, synth.splits, rp_id=3, mode="raw", C=3)
    path = tmp_path / "bad.jsonl"
    save_dataset(path, a)
    with open(path, "a", encoding="utf-8") as fh:
        text = (tmp_path / "b.jsonl")
        save_dataset(text, b)
        fh.write(text.read_text())
    with pytest.raises(DataError):
        load_dataset(path)


def test_load_dataset_line_errors(tmp_path):
    path = tmp_path / "ds.jsonl"
    path.write_text("not json\n")
    with pytest.raises(DataError, match=":1:"):
        load_dataset(path)
