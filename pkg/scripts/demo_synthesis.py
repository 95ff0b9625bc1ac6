#!/usr/bin/env python3
"""Synthesize free-space micro-Doppler signatures for both motion types
at every catalog yaw and render them as one montage PNG.

Free-space synthesis is analytic, so this runs in seconds and needs no
FDTD maps.

Usage: python3 scripts/demo_synthesis.py [out_dir]
"""

import sys
from pathlib import Path

from twsim.doppler import write_image
from twsim.pipeline import BuildConfig, plot_images, run_case


def main(out_dir="demo_out"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = BuildConfig(output_dir=str(out))
    paths = []
    for motion in config.motions:
        for yaw in config.yaws:
            img, _ = run_case("free_space", motion, yaw, config)
            p = out / f"fs_{motion}_y{int(yaw)}.twmd"
            write_image(img, p)
            paths.append(p)
            print(f"wrote {p}")
    written = plot_images(paths, out_dir=out, montage=True)
    print(f"montage: {written[0]}")


if __name__ == "__main__":
    main(*sys.argv[1:])
