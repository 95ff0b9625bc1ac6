"""Helpers for constructing synthetic scatterer tracks in tests."""

import numpy as np

from twsim.motion import ScattererTrack


def make_track(positions, amplitude=None, radar_pos=(0.0, 0.5, 0.5),
               sample_rate=500.0):
    """Build a ScattererTrack with consistent derived geometry.

    ``positions``: (N, B, 3) world scatterer centroids.
    """
    positions = np.asarray(positions, dtype=float)
    n, b, _ = positions.shape
    radar = np.asarray(radar_pos)
    rho = positions[:, :, [0, 2]]
    rho_dist = np.linalg.norm(rho - radar[[0, 2]], axis=2)
    r = np.linalg.norm(positions - radar, axis=2)
    if amplitude is None:
        amplitude = np.ones((n, b))
    return ScattererTrack(
        bone_names=[f"b{k}" for k in range(b)],
        positions=positions, rho=rho, rho_dist=rho_dist, r=r,
        amplitude=np.asarray(amplitude, dtype=float),
        sample_rate=sample_rate, radar_pos=tuple(radar_pos))


def radial_approach(speed=2.0, start_range=3.5, duration=1.53,
                    sample_rate=500.0, radar_pos=(0.0, 0.5, 0.5)):
    """Single scatterer moving straight at the radar along +z at the
    radar's height, at constant speed."""
    n = round(duration * sample_rate)
    t = np.arange(n) / sample_rate
    z = radar_pos[2] + start_range - speed * t
    pos = np.zeros((n, 1, 3))
    pos[:, 0, 0] = radar_pos[0]
    pos[:, 0, 1] = radar_pos[1]
    pos[:, 0, 2] = z
    return make_track(pos, radar_pos=radar_pos, sample_rate=sample_rate)
