"""Readers for the simulation toolkit's exported dataset.

This package couples to the simulator only through its file formats, so
the ``.twmd`` layout is parsed here independently: magic "TWMD", u32
version, u32 height, u32 width, motion code u8, yaw f32, length-prefixed
UTF-8 wall id, split code u8, then height*width little-endian f32 pixels
row-major.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["TwmdImage", "PairSet", "DataError", "read_twmd", "load_manifest",
           "pair_dataset"]

TWMD_MAGIC = b"TWMD"
TWMD_VERSION = 1
IMAGE_SIZE = 64

MOTION_NAMES = {0: "walk", 1: "walk_leap_walk"}
SPLIT_NAMES = {0: "train", 1: "test", 2: "unsplit"}


class DataError(Exception):
    pass


@dataclass
class TwmdImage:
    pixels: np.ndarray  # (64, 64) float32 in [0, 1]
    motion_id: str
    yaw_deg: float
    wall_id: str
    split: str


def read_twmd(path) -> TwmdImage:
    with open(path, "rb") as f:
        if f.read(4) != TWMD_MAGIC:
            raise DataError(f"{path}: bad magic")
        version, h, w = struct.unpack("<III", f.read(12))
        if version != TWMD_VERSION:
            raise DataError(f"{path}: unsupported version {version}")
        if (h, w) != (IMAGE_SIZE, IMAGE_SIZE):
            raise DataError(f"{path}: unexpected size {h}x{w}")
        motion_code, yaw = struct.unpack("<Bf", f.read(5))
        (wall_len,) = struct.unpack("<I", f.read(4))
        wall_id = f.read(wall_len).decode()
        (split_code,) = struct.unpack("<B", f.read(1))
        raw = f.read(h * w * 4)
        if len(raw) != h * w * 4:
            raise DataError(f"{path}: truncated pixels")
    pixels = np.frombuffer(raw, dtype="<f4").reshape(h, w).copy()
    if pixels.min() < 0.0 or pixels.max() > 1.0:
        raise DataError(f"{path}: pixels outside [0, 1]")
    return TwmdImage(pixels=pixels,
                     motion_id=MOTION_NAMES.get(motion_code, "?"),
                     yaw_deg=float(yaw), wall_id=wall_id,
                     split=SPLIT_NAMES.get(split_code, "?"))


def load_manifest(dataset_dir) -> list[dict]:
    path = Path(dataset_dir) / "manifest.json"
    if not path.exists():
        raise DataError(f"no manifest at {path}")
    doc = json.loads(path.read_text())
    return doc["entries"]


@dataclass
class PairSet:
    """Free-space / through-wall image pairs keyed by (motion, yaw)."""

    x: np.ndarray  # (N, 64, 64) free-space inputs
    y: np.ndarray  # (N, 64, 64) through-wall targets
    wall_ids: list[str]
    motions: list[str]
    yaws: np.ndarray
    splits: list[str]

    @property
    def n_pairs(self) -> int:
        return self.x.shape[0]

    def subset(self, split: str) -> "PairSet":
        keep = [i for i, s in enumerate(self.splits) if s == split]
        return self.select(keep)

    def select(self, idx) -> "PairSet":
        idx = list(idx)
        return PairSet(x=self.x[idx], y=self.y[idx],
                       wall_ids=[self.wall_ids[i] for i in idx],
                       motions=[self.motions[i] for i in idx],
                       yaws=self.yaws[idx],
                       splits=[self.splits[i] for i in idx])


def pair_dataset(dataset_dir) -> PairSet:
    """Pair every through-wall image with the free-space image of the
    same (motion, yaw)."""
    root = Path(dataset_dir)
    entries = load_manifest(root)
    free: dict[tuple[str, float], np.ndarray] = {}
    walls = []
    for e in entries:
        img = read_twmd(root / e["path"])
        key = (e["motion_id"], float(e["yaw_deg"]))
        if e["wall_id"] == "free_space":
            free[key] = img.pixels
        else:
            walls.append((key, e, img))
    if not walls:
        raise DataError("manifest has no through-wall entries")
    xs, ys, wall_ids, motions, yaws, splits = [], [], [], [], [], []
    for key, e, img in walls:
        if key not in free:
            raise DataError(
                f"no free-space counterpart for motion={key[0]} yaw={key[1]}")
        xs.append(free[key])
        ys.append(img.pixels)
        wall_ids.append(e["wall_id"])
        motions.append(key[0])
        yaws.append(key[1])
        splits.append(e["split"])
    return PairSet(x=np.stack(xs), y=np.stack(ys), wall_ids=wall_ids,
                   motions=motions, yaws=np.array(yaws), splits=splits)
