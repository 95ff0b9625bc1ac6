import numpy as np
import pytest

from twmdutil import write_dataset, write_twmd
from twgan.data import DataError, pair_dataset, load_manifest, read_twmd


def test_read_twmd_round_trip(tmp_path, rng):
    pixels = rng.random((64, 64)).astype(np.float32)
    p = tmp_path / "img.twmd"
    write_twmd(p, pixels, motion_id="walk_leap_walk", yaw_deg=45.0,
               wall_id="some_wall", split="test")
    img = read_twmd(p)
    assert np.array_equal(img.pixels, pixels)
    assert img.motion_id == "walk_leap_walk"
    assert img.yaw_deg == 45.0
    assert img.wall_id == "some_wall"
    assert img.split == "test"


def test_read_twmd_rejects_corruption(tmp_path, rng):
    p = tmp_path / "bad.twmd"
    p.write_bytes(b"XXXX" + b"\x00" * 64)
    with pytest.raises(DataError):
        read_twmd(p)
    good = tmp_path / "trunc.twmd"
    write_twmd(good, rng.random((64, 64)))
    good.write_bytes(good.read_bytes()[:-10])
    with pytest.raises(DataError):
        read_twmd(good)


def test_read_twmd_rejects_out_of_range(tmp_path):
    p = tmp_path / "range.twmd"
    write_twmd(p, np.full((64, 64), 1.5, dtype=np.float32))
    with pytest.raises(DataError):
        read_twmd(p)


def _mini_entries(rng):
    entries = []
    for motion in ("walk", "walk_leap_walk"):
        entries.append(dict(pixels=rng.random((64, 64)), motion_id=motion,
                            yaw_deg=0.0, wall_id="free_space",
                            split="unsplit"))
        for wall, split in (("wall_a", "train"), ("wall_b", "test")):
            entries.append(dict(pixels=rng.random((64, 64)),
                                motion_id=motion, yaw_deg=0.0,
                                wall_id=wall, split=split))
    return entries


def test_pair_dataset(tmp_path, rng):
    root = write_dataset(tmp_path, _mini_entries(rng))
    pairs = pair_dataset(root)
    assert pairs.n_pairs == 4
    assert pairs.x.shape == (4, 64, 64)
    # every pair's input is the free-space image of its (motion, yaw)
    entries = load_manifest(root)
    free = {e["motion_id"]: read_twmd(root / e["path"]).pixels
            for e in entries if e["wall_id"] == "free_space"}
    for k in range(4):
        assert np.array_equal(pairs.x[k], free[pairs.motions[k]])
    assert sorted(pairs.wall_ids) == ["wall_a", "wall_a", "wall_b", "wall_b"]


def test_pair_dataset_split_subsets(tmp_path, rng):
    root = write_dataset(tmp_path, _mini_entries(rng))
    pairs = pair_dataset(root)
    train = pairs.subset("train")
    test = pairs.subset("test")
    assert train.n_pairs == 2 and test.n_pairs == 2
    assert set(train.wall_ids) == {"wall_a"}
    assert set(test.wall_ids) == {"wall_b"}


def test_pair_dataset_missing_counterpart(tmp_path, rng):
    entries = [e for e in _mini_entries(rng)
               if not (e["wall_id"] == "free_space"
                       and e["motion_id"] == "walk_leap_walk")]
    root = write_dataset(tmp_path, entries)
    with pytest.raises(DataError, match="walk_leap_walk"):
        pair_dataset(root)


def test_pair_dataset_requires_walls(tmp_path, rng):
    entries = [e for e in _mini_entries(rng) if e["wall_id"] == "free_space"]
    root = write_dataset(tmp_path, entries)
    with pytest.raises(DataError):
        pair_dataset(root)


def test_missing_manifest(tmp_path):
    with pytest.raises(DataError):
        load_manifest(tmp_path)


def test_fixture_dataset_pairs(dataset_dir):
    """The committed simulator-exported fixture pairs cleanly."""
    pairs = pair_dataset(dataset_dir)
    assert pairs.n_pairs == 16
    assert pairs.x.min() >= 0.0 and pairs.x.max() <= 1.0
    assert pairs.subset("train").n_pairs + pairs.subset("test").n_pairs == 16
