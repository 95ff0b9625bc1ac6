import numpy as np
import pytest

from twsim import fdtd
from twsim.fdtd import (C0, CourantError, FdtdError, FdtdSolver, GridConfig,
                        SourceSpec, StabilityError, build_scene,
                        extract_transmission, read_map, run, write_map)


def test_default_grid_dimensions(default_grid):
    assert default_grid.nx == 360
    assert default_grid.nz == 520
    assert default_grid.n_pml == 20
    assert default_grid.n_steps == 3270


def test_default_grid_satisfies_courant(default_grid):
    default_grid.validate()
    limit = default_grid.cell_size / (C0 * np.sqrt(2.0))
    assert default_grid.dt <= limit


def test_oversized_dt_rejected():
    bad = GridConfig(dt=0.04e-9)
    with pytest.raises(CourantError):
        bad.validate()


def test_negative_cell_rejected():
    with pytest.raises(FdtdError):
        GridConfig(cell_size=-0.01).validate()


def test_index_round_trip(default_grid):
    ix, iz = default_grid.index_of(0.0, 1.5)
    assert default_grid.x_of(ix) == pytest.approx(0.0)
    assert default_grid.z_of(iz) == pytest.approx(1.5)


def test_build_scene_free_space(default_grid):
    scene = build_scene(default_grid)
    assert scene.permittivity.shape == (360, 520)
    assert np.all(scene.permittivity == 1.0)
    assert np.all(scene.conductivity == 0.0)
    assert scene.wall_id == "free_space"


def test_scene_rejects_source_outside(small_grid):
    with pytest.raises(FdtdError):
        build_scene(small_grid, source=SourceSpec(position=(0.0, 0.9)))


def test_scene_rejects_bad_permittivity(small_grid):
    scene = build_scene(small_grid, source=SourceSpec(position=(0.0, 0.25)))
    scene.permittivity[3, 3] = 0.5
    with pytest.raises(FdtdError):
        scene.validate()


def _small_scene(small_grid, amplitude=1.0):
    src = SourceSpec(position=(0.0, 0.25), amplitude=amplitude)
    return build_scene(small_grid, source=src)


def test_zero_amplitude_source_leaves_fields_zero(small_grid):
    solver = FdtdSolver(_small_scene(small_grid, amplitude=0.0))
    solver.step(100)
    assert np.all(solver.state.ez == 0.0)
    assert np.all(solver.state.hx == 0.0)


def test_update_locality(small_grid):
    """After k steps the field is exactly zero beyond k cells from the
    source (one-cell-per-step causality of the leapfrog stencil)."""
    solver = FdtdSolver(_small_scene(small_grid))
    k = 10
    solver.step(k)
    ez = solver.state.ez
    nonzero = np.argwhere(ez != 0.0)
    assert nonzero.size > 0
    dist = np.abs(nonzero - [solver.src_i, solver.src_j]).max(axis=1)
    assert dist.max() <= k


def test_stepping_past_duration_raises(small_grid):
    solver = FdtdSolver(_small_scene(small_grid))
    with pytest.raises(FdtdError):
        solver.step(small_grid.n_steps + 1)


def test_non_finite_fields_detected(small_grid):
    solver = FdtdSolver(_small_scene(small_grid))
    solver.step(10)
    solver.state.ez[solver.src_i, solver.src_j] = np.nan
    with pytest.raises(StabilityError):
        solver.step(10)


def test_stepping_is_deterministic(small_grid):
    runs = []
    for _ in range(2):
        solver = FdtdSolver(_small_scene(small_grid))
        solver.step(small_grid.n_steps)
        runs.append(solver.state.ez.copy())
    assert np.array_equal(runs[0], runs[1])


def test_extraction_window_must_cover_a_cycle(small_grid):
    scene = _small_scene(small_grid)
    with pytest.raises(FdtdError):
        run(scene, extract_cycles=0)


def test_probe_series_steady_state(free_run):
    """The 1 m down-range probe reaches a steady sinusoid: cycle-peak
    variation under 1% over the last five carrier cycles."""
    record, _ = free_run
    series = next(iter(record.probes.values()))
    steps_per_cycle = round(1.0 / (record.grid.carrier_freq * record.grid.dt))
    peaks = [np.abs(series[-(c + 1) * steps_per_cycle:
                           len(series) - c * steps_per_cycle]).max()
             for c in range(5)]
    peaks = np.array(peaks)
    assert peaks.std() / peaks.mean() < 0.01


def test_free_space_reference_is_unity(free_map, default_grid):
    ix, iz = default_grid.index_of(0.0, 1.5)
    assert abs(free_map.h[ix, iz]) == pytest.approx(1.0)


def test_pml_reflection_below_minus_40db():
    """Truncating the domain must not echo: comparing a probe against the
    same run in a doubled domain bounds the boundary reflection."""
    common = dict(x_extent=(-1.0, 1.0), cell_size=0.0125, dt=2.0e-11,
                  duration=9.0e-9, pml_thickness=0.25)
    g_small = GridConfig(z_extent=(0.0, 2.0), **common)
    g_big = GridConfig(z_extent=(0.0, 4.0), **common)
    src = SourceSpec(position=(0.0, 0.25))
    probe = (0.0, 1.5)
    series = []
    for g in (g_small, g_big):
        rec = run(build_scene(g, source=src), probes=[probe],
                  extract_cycles=2)
        series.append(rec.probes[g.index_of(*probe)])
    reflected = np.abs(series[0] - series[1]).max()
    incident = np.abs(series[1]).max()
    assert reflected / incident < 10 ** (-40 / 20)


def test_twtm_round_trip(tmp_path):
    g = GridConfig(x_extent=(0.0, 0.1), z_extent=(0.0, 0.075))
    rng = np.random.default_rng(7)
    h = (rng.normal(size=(g.nx, g.nz))
         + 1j * rng.normal(size=(g.nx, g.nz))).astype(np.complex64)
    tmap = fdtd.TransmissionMap(h=h.astype(np.complex128), grid=g,
                                wall_id="free_space")
    path = tmp_path / "m.twtm"
    write_map(tmap, path)
    back = read_map(path, grid=g)
    assert np.array_equal(back.h.astype(np.complex64), h)


def test_twtm_write_read_idempotent(tmp_path):
    g = GridConfig(x_extent=(0.0, 0.1), z_extent=(0.0, 0.075))
    h = np.arange(g.nx * g.nz, dtype=float).reshape(g.nx, g.nz) * (1 + 1j)
    path1 = tmp_path / "a.twtm"
    path2 = tmp_path / "b.twtm"
    write_map(fdtd.TransmissionMap(h=h, grid=g), path1)
    write_map(read_map(path1, grid=g), path2)
    assert path1.read_bytes() == path2.read_bytes()


def test_read_map_rejects_bad_magic(tmp_path):
    p = tmp_path / "bad.twtm"
    p.write_bytes(b"NOPE" + b"\x00" * 32)
    with pytest.raises(FdtdError):
        read_map(p)


def test_read_map_rejects_truncation(tmp_path):
    g = GridConfig(x_extent=(0.0, 0.1), z_extent=(0.0, 0.075))
    h = np.ones((g.nx, g.nz), dtype=complex)
    p = tmp_path / "t.twtm"
    write_map(fdtd.TransmissionMap(h=h, grid=g), p)
    p.write_bytes(p.read_bytes()[:-4])
    with pytest.raises(FdtdError):
        read_map(p)


def test_extraction_rejects_other_frequency(free_run):
    record, _ = free_run
    with pytest.raises(FdtdError):
        extract_transmission(record, f_c=5.0e9)
