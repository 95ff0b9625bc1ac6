#!/usr/bin/env python3
"""Regenerate the golden binary-format fixtures under tests/golden/.

The fixtures pin the on-disk layout of the three file formats; run this
only when the formats change intentionally, and update the frozen values
in tests/test_formats.py to match.
"""

from pathlib import Path

import numpy as np

from twsim.doppler import GanImage, write_image
from twsim.fdtd import GridConfig, TransmissionMap, write_map
from twsim.radar import ComplexTimeSeries, write_baseband

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden"


def golden_map():
    g = GridConfig(x_extent=(0.0, 0.05), z_extent=(0.0, 0.0375))
    idx = np.arange(g.nx * g.nz, dtype=float).reshape(g.nx, g.nz)
    h = (idx / 8.0) - 1j * idx
    write_map(TransmissionMap(h=h, grid=g), OUT / "sample.twtm")


def golden_baseband():
    n = 8
    k = np.arange(n, dtype=float)
    samples = np.cos(k) + 1j * np.sin(2 * k)
    series = ComplexTimeSeries(samples=samples, sample_rate=500.0,
                               label="free_space")
    write_baseband(series, OUT / "sample.twbb")


def golden_image():
    idx = np.arange(64 * 64, dtype=np.float32).reshape(64, 64)
    pixels = idx / (64 * 64 - 1)
    img = GanImage(pixels=pixels, motion_id="walk_leap_walk", yaw_deg=45.0,
                   wall_id="ml_er1-2_er2-4_l1-5_l2-15", split_tag="train")
    write_image(img, OUT / "sample.twmd")


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    golden_map()
    golden_baseband()
    golden_image()
    for p in sorted(OUT.iterdir()):
        print(p.name, p.stat().st_size)
