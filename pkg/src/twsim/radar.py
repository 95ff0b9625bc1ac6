"""Narrowband baseband radar return synthesis.

Sums per-bone contributions: amplitude sqrt(RCS) times the squared
(two-way) propagation response, with the residual phase term that lifts
the 2D propagation solution to the 3D scatterer geometry. Free-space
synthesis replaces the simulated response with the analytic normalized
two-way law.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .fdtd import C0, FdtdError, TransmissionMap
from .motion import ScattererTrack

__all__ = [
    "RadarParams", "ComplexTimeSeries", "RadarError",
    "sample_transmission", "synth_throughwall", "synth_freespace",
    "write_baseband", "read_baseband", "REFERENCE_DISTANCE",
]

REFERENCE_DISTANCE = 1.0  # meters; matches the transmission-map normalization

TWBB_MAGIC = b"TWBB"


class RadarError(Exception):
    pass


@dataclass(frozen=True)
class RadarParams:
    f_c: float = 2.4e9
    amplitude: float = 1.0  # radiated-power calibration
    position: tuple[float, float, float] = (0.0, 0.5, 0.5)  # (x, height, z)

    def validate(self) -> None:
        if self.f_c <= 0 or self.amplitude <= 0:
            raise RadarError("carrier and amplitude must be positive")


@dataclass
class ComplexTimeSeries:
    samples: np.ndarray
    sample_rate: float
    label: str  # "free_space" or a wall id
    motion_id: str = ""
    yaw_deg: float = 0.0

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    def validate(self) -> None:
        if not np.all(np.isfinite(self.samples)):
            raise RadarError("non-finite samples")


def sample_transmission(tmap: TransmissionMap, rho: np.ndarray) -> np.ndarray:
    """Bilinear interpolation of the complex map at ground points.

    ``rho``: (..., 2) positions (x, z) strictly inside the interior.
    """
    g = tmap.grid
    rho = np.asarray(rho, dtype=float)
    fx = (rho[..., 0] - g.x_extent[0]) / g.cell_size
    fz = (rho[..., 1] - g.z_extent[0]) / g.cell_size
    if np.any(fx < 0) or np.any(fx > g.nx - 1) or np.any(fz < 0) or np.any(fz > g.nz - 1):
        raise RadarError("sample point outside the map interior")
    ix = np.minimum(fx.astype(int), g.nx - 2)
    iz = np.minimum(fz.astype(int), g.nz - 2)
    wx = fx - ix
    wz = fz - iz
    h = tmap.h
    return ((1 - wx) * (1 - wz) * h[ix, iz]
            + wx * (1 - wz) * h[ix + 1, iz]
            + (1 - wx) * wz * h[ix, iz + 1]
            + wx * wz * h[ix + 1, iz + 1])


def _check_track(track: ScattererTrack, p: RadarParams) -> None:
    rx, ry, rz = p.position
    if not np.allclose(track.radar_pos, p.position):
        raise RadarError("track was sampled against a different radar position")


def synth_throughwall(track: ScattererTrack, tmap: TransmissionMap,
                      p: RadarParams = RadarParams()) -> ComplexTimeSeries:
    """Coherent sum over bones of a * H^2 * exp(-j 4 pi f/c (r - rho))."""
    p.validate()
    _check_track(track, p)
    if not np.isclose(tmap.grid.carrier_freq, p.f_c):
        raise RadarError("map carrier differs from radar carrier")
    h = sample_transmission(tmap, track.rho)  # (N, B)
    phase = -4.0 * np.pi * (p.f_c / C0) * (track.r - track.rho_dist)
    contrib = p.amplitude * track.amplitude * h ** 2 * np.exp(1j * phase)
    s = contrib.sum(axis=1)
    out = ComplexTimeSeries(samples=s, sample_rate=track.sample_rate,
                            label=tmap.wall_id)
    out.validate()
    return out


def synth_freespace(track: ScattererTrack,
                    p: RadarParams = RadarParams()) -> ComplexTimeSeries:
    """Analytic free-space baseline: two-way inverse-square amplitude,
    total phase -j 4 pi f/c r."""
    p.validate()
    _check_track(track, p)
    decay = (REFERENCE_DISTANCE / track.r) ** 2
    phase = -4.0 * np.pi * (p.f_c / C0) * track.r
    contrib = p.amplitude * track.amplitude * decay * np.exp(1j * phase)
    s = contrib.sum(axis=1)
    out = ComplexTimeSeries(samples=s, sample_rate=track.sample_rate,
                            label="free_space")
    out.validate()
    return out


def write_baseband(series: ComplexTimeSeries, path) -> None:
    series.validate()
    with open(path, "wb") as f:
        f.write(TWBB_MAGIC)
        f.write(struct.pack("<Id", series.n_samples, series.sample_rate))
        data = np.empty((series.n_samples, 2), dtype="<f4")
        data[:, 0] = series.samples.real
        data[:, 1] = series.samples.imag
        f.write(data.tobytes())


def read_baseband(path) -> ComplexTimeSeries:
    with open(path, "rb") as f:
        if f.read(4) != TWBB_MAGIC:
            raise RadarError("bad baseband magic")
        header = f.read(struct.calcsize("<Id"))
        if len(header) != struct.calcsize("<Id"):
            raise RadarError("truncated baseband header")
        n, fs = struct.unpack("<Id", header)
        raw = f.read(n * 8)
        if len(raw) != n * 8:
            raise RadarError("truncated baseband payload")
    data = np.frombuffer(raw, dtype="<f4").reshape(n, 2)
    return ComplexTimeSeries(samples=(data[:, 0] + 1j * data[:, 1]).astype(complex),
                             sample_rate=fs, label="")
