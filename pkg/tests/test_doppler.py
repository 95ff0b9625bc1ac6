import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twsim.doppler import (DopplerError, GanImage, Spectrogram, export_png,
                           read_image, stft, to_gan_image, write_image)
from twsim.radar import ComplexTimeSeries


def tone_series(freq_hz, n=765, fs=500.0, amp=1.0):
    t = np.arange(n) / fs
    return ComplexTimeSeries(samples=amp * np.exp(2j * np.pi * freq_hz * t),
                             sample_rate=fs, label="free_space")


def test_stft_shape_and_axes():
    spec = stft(tone_series(0.0))
    assert spec.values.shape == (222, 200)
    assert spec.n_frames == 222
    assert spec.doppler_axis[0] == -250.0
    assert spec.doppler_axis[-1] == 247.5
    assert np.allclose(np.diff(spec.doppler_axis), 2.5)
    assert spec.frame_times[0] == pytest.approx(99 / 2 / 500.0)
    assert np.allclose(np.diff(spec.frame_times), 3 / 500.0)


def test_stft_rejects_short_series():
    with pytest.raises(DopplerError):
        stft(tone_series(0.0, n=50))


def test_stft_rejects_bad_hop():
    with pytest.raises(DopplerError):
        stft(tone_series(0.0), hop=0)


@settings(deadline=None, max_examples=30)
@given(st.integers(min_value=-99, max_value=99))
def test_tone_lands_in_its_bin(k):
    """A complex tone at k * 2.5 Hz peaks in Doppler bin 100 + k in every
    frame."""
    spec = stft(tone_series(2.5 * k))
    peaks = np.argmax(np.abs(spec.values), axis=1)
    assert np.all(peaks == 100 + k)


def test_stft_is_linear():
    a = tone_series(40.0)
    b = tone_series(-75.0, amp=0.3)
    ab = ComplexTimeSeries(samples=a.samples + b.samples, sample_rate=500.0,
                           label="free_space")
    lhs = stft(ab).values
    rhs = stft(a).values + stft(b).values
    assert np.max(np.abs(lhs - rhs)) < 1e-9 * np.max(np.abs(lhs))


def test_stft_frame_energy_matches_windowed_segment():
    """Zero-padded DFT preserves energy: sum |X|^2 = n_fft * sum |x_w|^2."""
    rng = np.random.default_rng(9)
    x = rng.normal(size=765) + 1j * rng.normal(size=765)
    series = ComplexTimeSeries(samples=x, sample_rate=500.0, label="t")
    spec = stft(series)
    w = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(100) / 100)
    seg = x[:100] * w
    lhs = np.sum(np.abs(spec.values[0]) ** 2)
    rhs = 200 * np.sum(np.abs(seg) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-6)


def test_gan_image_shape_and_range():
    img = to_gan_image(stft(tone_series(100.0)))
    assert img.pixels.shape == (64, 64)
    assert img.pixels.dtype == np.float32
    assert img.pixels.min() >= 0.0 and img.pixels.max() <= 1.0


def test_gan_image_tone_row():
    """A +100 Hz tone sits in image row 52: bins cover [-160, 160) Hz in
    5 Hz steps, low frequencies in low rows."""
    img = to_gan_image(stft(tone_series(100.0)))
    rows = np.argmax(img.pixels, axis=0)
    assert np.all(rows == 52)


def test_gan_image_zero_series_is_flat():
    img = to_gan_image(stft(tone_series(0.0, amp=0.0)))
    assert np.all(img.pixels == 0.5)


def test_gan_image_constant_magnitude_is_flat():
    spec = stft(tone_series(0.0))
    spec.values = np.ones_like(spec.values)
    img = to_gan_image(spec)
    assert np.all(img.pixels == 0.5)


def test_gan_image_rejects_nonstandard_axis():
    spec = Spectrogram(values=np.ones((10, 100), dtype=complex),
                       frame_times=np.arange(10.0),
                       doppler_axis=np.linspace(-125, 122.5, 100))
    with pytest.raises(DopplerError):
        to_gan_image(spec)


def test_gan_image_validation():
    bad = GanImage(pixels=np.full((64, 64), 2.0, dtype=np.float32))
    with pytest.raises(DopplerError):
        bad.validate()
    bad = GanImage(pixels=np.zeros((32, 64), dtype=np.float32))
    with pytest.raises(DopplerError):
        bad.validate()
    bad = GanImage(pixels=np.zeros((64, 64), dtype=np.float32),
                   motion_id="sprint")
    with pytest.raises(DopplerError):
        bad.validate()


def _example_image():
    rng = np.random.default_rng(2)
    pixels = rng.random((64, 64)).astype(np.float32)
    return GanImage(pixels=pixels, motion_id="walk_leap_walk", yaw_deg=30.0,
                    wall_id="ag_er-4.889_th-30_g4", split_tag="test")


def test_twmd_round_trip(tmp_path):
    img = _example_image()
    path = tmp_path / "img.twmd"
    write_image(img, path)
    back = read_image(path)
    assert np.array_equal(back.pixels, img.pixels)
    assert back.motion_id == img.motion_id
    assert back.yaw_deg == img.yaw_deg
    assert back.wall_id == img.wall_id
    assert back.split_tag == img.split_tag


def test_twmd_write_read_idempotent(tmp_path):
    img = _example_image()
    p1, p2 = tmp_path / "a.twmd", tmp_path / "b.twmd"
    write_image(img, p1)
    write_image(read_image(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_twmd_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad.twmd"
    p.write_bytes(b"ABCD" + b"\x00" * 64)
    with pytest.raises(DopplerError):
        read_image(p)


def test_twmd_rejects_bad_version(tmp_path):
    img = _example_image()
    p = tmp_path / "v.twmd"
    write_image(img, p)
    raw = bytearray(p.read_bytes())
    raw[4] = 99
    p.write_bytes(bytes(raw))
    with pytest.raises(DopplerError):
        read_image(p)


def test_twmd_rejects_truncation(tmp_path):
    img = _example_image()
    p = tmp_path / "t.twmd"
    write_image(img, p)
    p.write_bytes(p.read_bytes()[:-100])
    with pytest.raises(DopplerError):
        read_image(p)


def test_export_png(tmp_path):
    from PIL import Image

    img = _example_image()
    gray = tmp_path / "gray.png"
    color = tmp_path / "color.png"
    export_png(img, gray)
    export_png(img, color, colormap="viridis")
    assert Image.open(gray).size == (64, 64)
    assert Image.open(color).mode == "RGB"
