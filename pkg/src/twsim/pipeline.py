"""Dataset build orchestration: transmission-map sweeps, track synthesis,
spectrogram generation, stratified splitting and the JSON manifest."""

from __future__ import annotations

import hashlib
import json
import os
import multiprocessing
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .doppler import GanImage, read_image, stft, to_gan_image, write_image
from .fdtd import (FdtdError, GridConfig, SourceSpec, TransmissionMap,
                   build_scene, extract_transmission, read_map,
                   reference_magnitude, run, write_map)
from .motion import (CLIP_DURATION, GaitParams, MotionError, generate_walk,
                     place_and_orient, sample_tracks)
from .radar import RadarParams, synth_freespace, synth_throughwall
from . import walls as wallmod

__all__ = ["BuildConfig", "DatasetManifest", "PipelineError", "build_dataset",
           "run_case", "load_config", "validate_manifest", "config_hash",
           "plot_images", "ensure_map", "CACHE_ENV"]

CACHE_ENV = "TWSIM_CACHE_DIR"
ALLOWED_YAWS = (0.0, 15.0, 30.0, 45.0)
ALLOWED_MOTIONS = ("walk", "walk_leap_walk")


class PipelineError(Exception):
    pass


@dataclass(frozen=True)
class BuildConfig:
    output_dir: str = "dataset"
    seed: int = 0
    split_fraction: float = 0.8
    motions: tuple[str, ...] = ALLOWED_MOTIONS
    yaws: tuple[float, ...] = ALLOWED_YAWS
    wall_ids: tuple[str, ...] | None = None  # None = full 120-case catalog
    parallelism: int = 0  # 0 = cpu count
    front_z: float = 1.0
    start: tuple[float, float] = (0.0, 3.0)
    grid: GridConfig = field(default_factory=GridConfig)
    radar: RadarParams = field(default_factory=RadarParams)
    gait: GaitParams = field(default_factory=GaitParams)
    save_spectrograms: bool = False

    def validate(self) -> None:
        if not (0.0 < self.split_fraction < 1.0):
            raise PipelineError("split fraction must be in (0, 1)")
        for m in self.motions:
            if m not in ALLOWED_MOTIONS:
                raise PipelineError(f"unknown motion {m!r}")
        for y in self.yaws:
            if y not in ALLOWED_YAWS:
                raise PipelineError(f"yaw {y} outside the catalog {ALLOWED_YAWS}")
        self.grid.validate()
        self.radar.validate()

    @property
    def workers(self) -> int:
        return self.parallelism or os.cpu_count() or 1


def config_hash(config: BuildConfig) -> str:
    blob = json.dumps(asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _grid_hash(config: BuildConfig) -> str:
    """Hash of everything a transmission map depends on."""
    blob = json.dumps([asdict(config.grid), config.front_z], sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:8]


@dataclass
class DatasetManifest:
    entries: list[dict]
    seed: int
    config_hash: str
    tool_version: str
    failures: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"tool_version": self.tool_version, "seed": self.seed,
             "config_hash": self.config_hash, "entries": self.entries,
             "failures": self.failures},
            indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DatasetManifest":
        d = json.loads(text)
        return cls(entries=d["entries"], seed=d["seed"],
                   config_hash=d["config_hash"],
                   tool_version=d["tool_version"],
                   failures=d.get("failures", []))


def _cache_dir(config: BuildConfig) -> Path:
    env = os.environ.get(CACHE_ENV)
    d = Path(env) if env else Path(config.output_dir) / "maps"
    d.mkdir(parents=True, exist_ok=True)
    return d


def _map_path(config: BuildConfig, wall_id: str) -> Path:
    return _cache_dir(config) / f"{wall_id}.{_grid_hash(config)}.twtm"


def _ref_path(config: BuildConfig) -> Path:
    return _cache_dir(config) / f"free_space.{_grid_hash(config)}.ref.json"


def _compute_free_map(config: BuildConfig) -> tuple[TransmissionMap, float]:
    scene = build_scene(config.grid, wall=None,
                        source=SourceSpec(frequency=config.grid.carrier_freq))
    record = run(scene)
    ref = reference_magnitude(record)
    tmap = extract_transmission(record, reference_mag=ref)
    return tmap, ref


def ensure_free_map(config: BuildConfig) -> tuple[TransmissionMap, float]:
    path = _map_path(config, "free_space")
    ref_path = _ref_path(config)
    if path.exists() and ref_path.exists():
        ref = json.loads(ref_path.read_text())["reference_magnitude"]
        return read_map(path, grid=config.grid, wall_id="free_space"), ref
    tmap, ref = _compute_free_map(config)
    write_map(tmap, path)
    ref_path.write_text(json.dumps({"reference_magnitude": ref}))
    return tmap, ref


def ensure_map(config: BuildConfig, wall_id: str,
               reference_mag: float | None = None) -> TransmissionMap:
    """Compute-or-load the transmission map for a wall case (or free space)."""
    if wall_id in ("free_space", "free", None):
        return ensure_free_map(config)[0]
    path = _map_path(config, wall_id)
    if path.exists():
        return read_map(path, grid=config.grid, wall_id=wall_id)
    if reference_mag is None:
        reference_mag = ensure_free_map(config)[1]
    case = wallmod.case_by_id(wall_id)
    scene = build_scene(config.grid, wall=case,
                        source=SourceSpec(frequency=config.grid.carrier_freq),
                        front_z=config.front_z)
    record = run(scene)
    tmap = extract_transmission(record, reference_mag=reference_mag)
    write_map(tmap, path)
    return tmap


def _map_worker(args) -> tuple[str, str | None]:
    config, wall_id, ref = args
    try:
        ensure_map(config, wall_id, reference_mag=ref)
        return wall_id, None
    except Exception as exc:  # failure policy: report, keep sweeping
        return wall_id, f"{type(exc).__name__}: {exc}"


def _interior_bounds(grid: GridConfig):
    return (grid.x_extent, grid.z_extent)


def build_track(config: BuildConfig, motion: str, yaw: float):
    skeleton, clip = generate_walk(motion, duration=CLIP_DURATION,
                                   params=config.gait)
    placed = place_and_orient(clip, start=config.start, yaw_deg=yaw,
                              bounds=_interior_bounds(config.grid))
    return sample_tracks(skeleton, placed, radar_pos=config.radar.position,
                         bounds=_interior_bounds(config.grid))


def _image_name(wall_id: str, motion: str, yaw: float) -> str:
    tag = "fs" if wall_id == "free_space" else "tw"
    wall_part = "" if wall_id == "free_space" else f"_{wall_id}"
    return f"{tag}{wall_part}_{motion}_y{int(yaw)}.twmd"


def run_case(wall_id: str, motion: str, yaw: float, config: BuildConfig,
             track=None, tmap: TransmissionMap | None = None,
             split_tag: str = "unsplit"):
    """Single-sample path through the full module chain."""
    if track is None:
        track = build_track(config, motion, yaw)
    if wall_id == "free_space":
        series = synth_freespace(track, config.radar)
    else:
        if tmap is None:
            tmap = ensure_map(config, wall_id)
        series = synth_throughwall(track, tmap, config.radar)
    series.motion_id = motion
    series.yaw_deg = yaw
    spec = stft(series)
    img = to_gan_image(spec, motion_id=motion, yaw_deg=yaw, wall_id=wall_id,
                       split_tag=split_tag)
    return img, spec


def _assign_splits(config: BuildConfig, cases: list) -> dict[tuple, str]:
    """Stratified train/test assignment over (motion, wall kind)."""
    import random

    strata: dict[tuple[str, str], list[tuple]] = {}
    for case in cases:
        for motion in config.motions:
            for yaw in config.yaws:
                key = (case.id, motion, yaw)
                strata.setdefault((motion, case.kind), []).append(key)
    rng = random.Random(config.seed)
    split: dict[tuple, str] = {}
    for skey in sorted(strata):
        keys = sorted(strata[skey])
        rng.shuffle(keys)
        n_train = round(config.split_fraction * len(keys))
        for k in keys[:n_train]:
            split[k] = "train"
        for k in keys[n_train:]:
            split[k] = "test"
    return split


def build_dataset(config: BuildConfig) -> DatasetManifest:
    """Full sweep: maps for every wall case, spectrogram images for every
    (wall|free) x motion x yaw combination, stratified split, manifest."""
    config.validate()
    out = Path(config.output_dir)
    images_dir = out / "images"
    images_dir.mkdir(parents=True, exist_ok=True)

    if config.wall_ids is None:
        cases = wallmod.enumerate_cases()
    else:
        cases = [wallmod.case_by_id(w) for w in config.wall_ids]

    _, ref = ensure_free_map(config)

    failures: list[dict] = []
    todo = [c.id for c in cases if not _map_path(config, c.id).exists()]
    if todo:
        args = [(config, wall_id, ref) for wall_id in todo]
        if config.workers > 1 and len(todo) > 1:
            ctx = multiprocessing.get_context("spawn")
            with ctx.Pool(config.workers) as pool:
                results = pool.map(_map_worker, args)
        else:
            results = [_map_worker(a) for a in args]
        for wall_id, err in results:
            if err is not None:
                failures.append({"wall_id": wall_id, "error": err})
    failed_ids = {f["wall_id"] for f in failures}
    good_cases = [c for c in cases if c.id not in failed_ids]

    tracks = {(m, y): build_track(config, m, y)
              for m in config.motions for y in config.yaws}
    split = _assign_splits(config, good_cases)

    entries: list[dict] = []

    def emit(wall_id: str, motion: str, yaw: float, split_tag: str,
             tmap=None) -> None:
        name = _image_name(wall_id, motion, yaw)
        path = images_dir / name
        if path.exists():
            try:
                existing = read_image(path)
                if (existing.wall_id == wall_id
                        and existing.motion_id == motion
                        and existing.yaw_deg == yaw
                        and existing.split_tag == split_tag):
                    entries.append(_entry(name, motion, yaw, wall_id, split_tag))
                    return
            except Exception:
                pass  # fall through and regenerate
        img, _ = run_case(wall_id, motion, yaw, config,
                          track=tracks[(motion, yaw)], tmap=tmap,
                          split_tag=split_tag)
        write_image(img, path)
        entries.append(_entry(name, motion, yaw, wall_id, split_tag))

    def _entry(name, motion, yaw, wall_id, split_tag):
        return {"path": f"images/{name}", "motion_id": motion,
                "yaw_deg": yaw, "wall_id": wall_id, "split": split_tag}

    for motion in config.motions:
        for yaw in config.yaws:
            emit("free_space", motion, yaw, "unsplit")
    for case in good_cases:
        tmap = ensure_map(config, case.id, reference_mag=ref)
        for motion in config.motions:
            for yaw in config.yaws:
                emit(case.id, motion, yaw, split[(case.id, motion, yaw)], tmap)

    entries.sort(key=lambda e: e["path"])
    manifest = DatasetManifest(entries=entries, seed=config.seed,
                               config_hash=config_hash(config),
                               tool_version=__version__, failures=failures)
    (out / "manifest.json").write_text(manifest.to_json())
    validate_manifest(manifest, out)
    return manifest


def validate_manifest(manifest: DatasetManifest, dataset_dir) -> None:
    """Entries and the images directory must agree exactly."""
    root = Path(dataset_dir)
    listed = {e["path"] for e in manifest.entries}
    if len(listed) != len(manifest.entries):
        raise PipelineError("duplicate manifest entries")
    for rel in listed:
        if not (root / rel).exists():
            raise PipelineError(f"manifest references missing file {rel}")
    on_disk = {f"images/{p.name}" for p in (root / "images").glob("*.twmd")}
    extra = on_disk - listed
    if extra:
        raise PipelineError(f"files not in manifest: {sorted(extra)[:5]}")


def load_config(path) -> BuildConfig:
    """Read a TOML build configuration; every key is optional."""
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    with open(path, "rb") as f:
        doc = tomllib.load(f)
    build = doc.get("build", {})
    cfg = BuildConfig()
    kw = {}
    for key in ("output_dir", "seed", "split_fraction", "parallelism",
                "front_z", "save_spectrograms"):
        if key in build:
            kw[key] = build[key]
    if "motions" in build:
        kw["motions"] = tuple(build["motions"])
    if "yaws" in build:
        kw["yaws"] = tuple(float(y) for y in build["yaws"])
    if "wall_ids" in build:
        kw["wall_ids"] = tuple(build["wall_ids"])
    if "start" in build:
        kw["start"] = tuple(build["start"])
    g = doc.get("grid", {})
    if g:
        gkw = {}
        for key in ("cell_size", "dt", "duration", "pml_thickness",
                    "carrier_freq"):
            if key in g:
                gkw[key] = g[key]
        if "x_extent" in g:
            gkw["x_extent"] = tuple(g["x_extent"])
        if "z_extent" in g:
            gkw["z_extent"] = tuple(g["z_extent"])
        kw["grid"] = replace(GridConfig(), **gkw)
    r = doc.get("radar", {})
    if r:
        rkw = {}
        if "f_c" in r:
            rkw["f_c"] = r["f_c"]
        if "amplitude" in r:
            rkw["amplitude"] = r["amplitude"]
        if "position" in r:
            rkw["position"] = tuple(r["position"])
        kw["radar"] = replace(RadarParams(), **rkw)
    gait = doc.get("gait", {})
    if gait:
        kw["gait"] = replace(GaitParams(), **gait)
    return replace(cfg, **kw)


def plot_images(paths, out_dir=None, montage: bool = False,
                duration: float = CLIP_DURATION):
    """Render TWMD images to labeled PNGs (or one montage grid)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    imgs = []
    for p in paths:
        p = Path(p)
        if not p.exists():
            raise PipelineError(f"no such image file: {p}")
        imgs.append((p, read_image(p)))
    out_dir = Path(out_dir) if out_dir else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    extent = [0.0, duration, -160.0, 160.0]

    def draw(ax, img):
        ax.imshow(img.pixels, origin="lower", aspect="auto", extent=extent,
                  cmap="viridis")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("Doppler (Hz)")
        ax.set_title(f"{img.motion_id} yaw {img.yaw_deg:g}\n{img.wall_id}",
                     fontsize=8)

    written = []
    if montage:
        n = len(imgs)
        rows = 2 if n > 4 else 1
        cols = int(np.ceil(n / rows))
        fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows),
                                 squeeze=False)
        for ax in axes.flat[n:]:
            ax.axis("off")
        for ax, (_, img) in zip(axes.flat, imgs):
            draw(ax, img)
        fig.tight_layout()
        target = out_dir / "montage.png"
        fig.savefig(target, dpi=120)
        plt.close(fig)
        written.append(target)
    else:
        for p, img in imgs:
            fig, ax = plt.subplots(figsize=(4, 3.2))
            draw(ax, img)
            fig.tight_layout()
            target = out_dir / (p.stem + ".png")
            fig.savefig(target, dpi=120)
            plt.close(fig)
            written.append(target)
    return written
