"""Command-line interface for the simulation toolkit."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import walls as wallmod
from .pipeline import (BuildConfig, build_dataset, ensure_map, load_config,
                       plot_images, run_case)


@click.group()
def main():
    """Through-wall micro-Doppler simulation toolkit."""


@main.group("walls")
def walls_group():
    """Wall case catalog."""


@walls_group.command("list")
@click.option("--json", "as_json", is_flag=True, help="Emit the catalog as JSON.")
def walls_list(as_json):
    if as_json:
        click.echo(wallmod.catalog_json())
        return
    for case in wallmod.enumerate_cases():
        click.echo(case.id)


@main.group("fdtd")
def fdtd_group():
    """Electromagnetic propagation runs."""


@fdtd_group.command("run")
@click.option("--wall", required=True,
              help="Wall case id, or 'free' for free space.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="TOML build configuration.")
@click.option("--out", "out_path", type=click.Path(),
              help="Copy the resulting .twtm map here.")
def fdtd_run(wall, config_path, out_path):
    """Compute (or load from cache) one transmission map."""
    cfg = load_config(config_path) if config_path else BuildConfig()
    wall_id = "free_space" if wall in ("free", "free_space") else wall
    tmap = ensure_map(cfg, wall_id)
    click.echo(f"map for {wall_id}: {tmap.grid.nx} x {tmap.grid.nz} cells, "
               f"max |H| = {abs(tmap.h).max():.3f}")
    if out_path:
        from .fdtd import write_map

        write_map(tmap, out_path)
        click.echo(f"wrote {out_path}")


@main.command("synth")
@click.option("--motion", required=True,
              type=click.Choice(["walk", "walk_leap_walk"]))
@click.option("--yaw", required=True, type=float)
@click.option("--wall", required=True,
              help="Wall case id, or 'free' for free space.")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Output .twmd path (default derived from the case).")
def synth(motion, yaw, wall, config_path, out_path):
    """Run the full chain for one case and write a 64x64 image."""
    from .doppler import write_image

    cfg = load_config(config_path) if config_path else BuildConfig()
    wall_id = "free_space" if wall in ("free", "free_space") else wall
    img, _ = run_case(wall_id, motion, yaw, cfg)
    if out_path is None:
        out_path = f"{wall_id}_{motion}_y{int(yaw)}.twmd"
    write_image(img, out_path)
    click.echo(f"wrote {out_path}")


@main.group("dataset")
def dataset_group():
    """Dataset builds."""


@dataset_group.command("build")
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="Override the configured output directory.")
@click.option("--workers", type=int, default=None)
def dataset_build(config_path, out_dir, workers):
    """Build the full spectrogram dataset and manifest."""
    from dataclasses import replace

    cfg = load_config(config_path) if config_path else BuildConfig()
    if out_dir:
        cfg = replace(cfg, output_dir=out_dir)
    if workers:
        cfg = replace(cfg, parallelism=workers)
    manifest = build_dataset(cfg)
    free = sum(1 for e in manifest.entries if e["wall_id"] == "free_space")
    tw = len(manifest.entries) - free
    click.echo(f"built {free} free-space + {tw} through-wall images "
               f"-> {cfg.output_dir}/manifest.json")
    if manifest.failures:
        for f in manifest.failures:
            click.echo(f"FAILED {f['wall_id']}: {f['error']}", err=True)
        sys.exit(1)


@main.command("plot")
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=".")
@click.option("--montage", is_flag=True, help="One grid image instead of "
              "one PNG per input.")
def plot(paths, out_dir, montage):
    """Render .twmd spectrogram images as labeled PNGs."""
    written = plot_images(list(paths), out_dir=out_dir, montage=montage)
    for w in written:
        click.echo(str(w))


if __name__ == "__main__":
    main()
