"""Short-time Fourier processing of baseband returns into Doppler-time
images, plus the 64x64 normalized form consumed by the learning stage."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .radar import ComplexTimeSeries

__all__ = [
    "Spectrogram", "GanImage", "DopplerError",
    "stft", "to_gan_image", "write_image", "read_image", "export_png",
    "WINDOW_SECONDS", "DOPPLER_STEP", "DOPPLER_SPAN", "DEFAULT_HOP",
    "MOTION_CODES", "SPLIT_CODES",
]

WINDOW_SECONDS = 0.2
DOPPLER_STEP = 2.5
DOPPLER_SPAN = 250.0  # bins cover [-250, +250) Hz
DEFAULT_HOP = 3

GAN_SIZE = 64
CROP_HZ = 160.0
FREQ_DECIMATE = 2
LOG_FLOOR_DB = 60.0

TWMD_MAGIC = b"TWMD"
TWMD_VERSION = 1

MOTION_CODES = {"walk": 0, "walk_leap_walk": 1}
SPLIT_CODES = {"train": 0, "test": 1, "unsplit": 2}
_MOTION_NAMES = {v: k for k, v in MOTION_CODES.items()}
_SPLIT_NAMES = {v: k for k, v in SPLIT_CODES.items()}


class DopplerError(Exception):
    pass


@dataclass
class Spectrogram:
    values: np.ndarray  # complex, (frames, doppler_bins)
    frame_times: np.ndarray
    doppler_axis: np.ndarray
    window_len: float = WINDOW_SECONDS

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_bins(self) -> int:
        return self.values.shape[1]


@dataclass
class GanImage:
    pixels: np.ndarray  # (64, 64) float32 in [0, 1]; rows = Doppler, cols = time
    motion_id: str = "walk"
    yaw_deg: float = 0.0
    wall_id: str = "free_space"
    split_tag: str = "unsplit"

    def validate(self) -> None:
        if self.pixels.shape != (GAN_SIZE, GAN_SIZE):
            raise DopplerError(f"image shape {self.pixels.shape} != 64x64")
        if self.pixels.min() < 0 or self.pixels.max() > 1:
            raise DopplerError("pixel values outside [0, 1]")
        if self.motion_id not in MOTION_CODES:
            raise DopplerError(f"unknown motion id {self.motion_id!r}")
        if self.split_tag not in SPLIT_CODES:
            raise DopplerError(f"unknown split tag {self.split_tag!r}")


def stft(series: ComplexTimeSeries, window_len: float = WINDOW_SECONDS,
         hop: int = DEFAULT_HOP) -> Spectrogram:
    """Hann-windowed sliding DFT, zero-padded so Doppler bins fall on a
    2.5 Hz grid over [-250, +250) Hz."""
    fs = series.sample_rate
    w = round(window_len * fs)
    n_bins = round(2 * DOPPLER_SPAN / DOPPLER_STEP)
    x = np.asarray(series.samples)
    if x.shape[0] < w:
        raise DopplerError(f"series of {x.shape[0]} samples shorter than the "
                           f"{w}-sample window")
    if hop < 1:
        raise DopplerError("hop must be >= 1")
    window = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(w) / w)
    segs = np.lib.stride_tricks.sliding_window_view(x, w)[::hop]
    spec = np.fft.fft(segs * window, n=n_bins, axis=1)
    spec = np.fft.fftshift(spec, axes=1)
    n_frames = segs.shape[0]
    frame_times = (np.arange(n_frames) * hop + (w - 1) / 2) / fs
    doppler = -DOPPLER_SPAN + DOPPLER_STEP * np.arange(n_bins)
    return Spectrogram(values=spec, frame_times=frame_times,
                       doppler_axis=doppler, window_len=w / fs)


def _resample_time(values: np.ndarray, n_out: int) -> np.ndarray:
    """Linear interpolation along axis 0 onto n_out evenly spaced frames."""
    n_in = values.shape[0]
    if n_in == 1:
        return np.repeat(values, n_out, axis=0)
    x_out = np.linspace(0.0, n_in - 1, n_out)
    i0 = np.minimum(x_out.astype(int), n_in - 2)
    frac = (x_out - i0)[:, None]
    return values[i0] * (1 - frac) + values[i0 + 1] * frac


def to_gan_image(spec: Spectrogram, motion_id: str = "walk",
                 yaw_deg: float = 0.0, wall_id: str = "free_space",
                 split_tag: str = "unsplit") -> GanImage:
    """Crop to +-160 Hz, decimate to 64 Doppler bins, resample to 64
    frames, then log-compress and min-max normalize the magnitude."""
    n_bins = round(2 * DOPPLER_SPAN / DOPPLER_STEP)
    if spec.n_bins != n_bins or not np.isclose(spec.doppler_axis[0], -DOPPLER_SPAN):
        raise DopplerError("spectrogram does not carry the standard Doppler axis")
    keep = (spec.doppler_axis >= -CROP_HZ) & (spec.doppler_axis < CROP_HZ)
    cropped = spec.values[:, keep][:, ::FREQ_DECIMATE]  # (frames, 64)
    resampled = _resample_time(cropped, GAN_SIZE)
    mag = np.abs(resampled).T  # rows = Doppler (low to high), cols = time
    peak = mag.max()
    if peak <= 0:
        pixels = np.full((GAN_SIZE, GAN_SIZE), 0.5, dtype=np.float32)
    else:
        db = 20.0 * np.log10(mag + 1e-6 * peak)
        db = np.maximum(db, db.max() - LOG_FLOOR_DB)
        lo, hi = db.min(), db.max()
        if hi == lo:
            pixels = np.full((GAN_SIZE, GAN_SIZE), 0.5, dtype=np.float32)
        else:
            pixels = ((db - lo) / (hi - lo)).astype(np.float32)
    img = GanImage(pixels=pixels, motion_id=motion_id, yaw_deg=yaw_deg,
                   wall_id=wall_id, split_tag=split_tag)
    img.validate()
    return img


def write_image(img: GanImage, path) -> None:
    img.validate()
    wall = img.wall_id.encode()
    with open(path, "wb") as f:
        f.write(TWMD_MAGIC)
        f.write(struct.pack("<III", TWMD_VERSION, GAN_SIZE, GAN_SIZE))
        f.write(struct.pack("<Bf", MOTION_CODES[img.motion_id], img.yaw_deg))
        f.write(struct.pack("<I", len(wall)))
        f.write(wall)
        f.write(struct.pack("<B", SPLIT_CODES[img.split_tag]))
        f.write(img.pixels.astype("<f4").tobytes())


def read_image(path) -> GanImage:
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != TWMD_MAGIC:
            raise DopplerError(f"bad magic {magic!r}")
        head = f.read(12)
        if len(head) != 12:
            raise DopplerError("truncated header")
        version, h, w = struct.unpack("<III", head)
        if version != TWMD_VERSION:
            raise DopplerError(f"unsupported image version {version}")
        if (h, w) != (GAN_SIZE, GAN_SIZE):
            raise DopplerError(f"unexpected image size {h}x{w}")
        meta = f.read(5)
        motion_code, yaw = struct.unpack("<Bf", meta)
        (wall_len,) = struct.unpack("<I", f.read(4))
        wall_id = f.read(wall_len).decode()
        (split_code,) = struct.unpack("<B", f.read(1))
        raw = f.read(h * w * 4)
        if len(raw) != h * w * 4:
            raise DopplerError("truncated pixel payload")
    pixels = np.frombuffer(raw, dtype="<f4").reshape(h, w).copy()
    img = GanImage(pixels=pixels, motion_id=_MOTION_NAMES[motion_code],
                   yaw_deg=float(yaw), wall_id=wall_id,
                   split_tag=_SPLIT_NAMES[split_code])
    img.validate()
    return img


def export_png(img: GanImage, path, colormap: str | None = None,
               origin_low_freq_bottom: bool = True) -> None:
    """8-bit PNG for eyeballing; grayscale or a named matplotlib colormap."""
    from PIL import Image

    pix = img.pixels
    if origin_low_freq_bottom:
        pix = pix[::-1]
    if colormap is None:
        arr = (pix * 255).astype(np.uint8)
        Image.fromarray(arr, mode="L").save(path)
    else:
        import matplotlib

        rgba = matplotlib.colormaps[colormap](pix)
        arr = (rgba[:, :, :3] * 255).astype(np.uint8)
        Image.fromarray(arr, mode="RGB").save(path)
