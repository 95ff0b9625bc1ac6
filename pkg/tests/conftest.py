import time

import numpy as np
import pytest

from twsim import fdtd


@pytest.fixture(scope="session")
def default_grid():
    return fdtd.GridConfig()


@pytest.fixture(scope="session")
def free_run(default_grid):
    """One full free-space run on the production grid, shared session-wide.

    Returns (record, wall-clock seconds) with a probe 1 m down-range.
    """
    scene = fdtd.build_scene(default_grid)
    t0 = time.time()
    record = fdtd.run(scene, probes=[(0.0, 1.5)])
    elapsed = time.time() - t0
    return record, elapsed


@pytest.fixture(scope="session")
def free_map(free_run):
    record, _ = free_run
    return fdtd.extract_transmission(record)


@pytest.fixture(scope="session")
def reference_mag(free_run):
    record, _ = free_run
    return fdtd.reference_magnitude(record)


@pytest.fixture(scope="session")
def small_grid():
    """Tiny, fast grid for stepping/locality/stability unit tests."""
    return fdtd.GridConfig(x_extent=(-0.25, 0.25), z_extent=(0.0, 0.5),
                           duration=4.0e-9)


def interior_bounds(grid):
    return (grid.x_extent, grid.z_extent)


@pytest.fixture(scope="session")
def walk_track():
    from twsim import motion

    g = fdtd.GridConfig()
    sk, clip = motion.generate_walk("walk")
    placed = motion.place_and_orient(clip, (0.0, 3.0), 0.0,
                                     bounds=interior_bounds(g))
    return sk, motion.sample_tracks(sk, placed, bounds=interior_bounds(g))
