"""Command-line interface for GAN training and realism scoring."""

from __future__ import annotations

from pathlib import Path

import click
import numpy as np

from .data import pair_dataset
from .dae import DaeConfig, score_curve, train_dae
from .train import TrainConfig, synthesize, train


@click.group()
def main():
    """GAN translation and realism scoring for micro-Doppler images."""


@main.command("train")
@click.option("--dataset", "dataset_dir", required=True,
              type=click.Path(exists=True),
              help="Dataset directory with manifest.json.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--epochs", default=1000, show_default=True)
@click.option("--batch-size", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--split", default="train", show_default=True,
              type=click.Choice(["train", "test", "all"]))
def train_cmd(dataset_dir, out_dir, epochs, batch_size, seed, split):
    """Train the translator on paired dataset images."""
    pairs = pair_dataset(dataset_dir)
    if split != "all":
        pairs = pairs.subset(split)
    checkpoints = tuple(e for e in (250, 500, 750, 1000) if e <= epochs)
    if not checkpoints or checkpoints[-1] != epochs:
        checkpoints = checkpoints + (epochs,)
    cfg = TrainConfig(out_dir=out_dir, epochs=epochs, batch_size=batch_size,
                      seed=seed, checkpoint_epochs=checkpoints)
    result = train(pairs.x, pairs.y, cfg)
    click.echo(f"trained {pairs.n_pairs} pairs for {epochs} epochs in "
               f"{result.seconds / 60:.1f} min; checkpoints: "
               + ", ".join(str(p) for p in result.checkpoints.values()))


@main.command("synth")
@click.option("--checkpoint", required=True, type=click.Path(exists=True))
@click.option("--dataset", "dataset_dir", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", default="fakes.npy", show_default=True)
@click.option("--seed", default=0, show_default=True)
def synth_cmd(checkpoint, dataset_dir, out_path, seed):
    """Generate through-wall images for every free-space input."""
    pairs = pair_dataset(dataset_dir)
    keys = sorted(set(zip(pairs.motions, pairs.yaws)))
    idx = [next(i for i in range(pairs.n_pairs)
                if (pairs.motions[i], pairs.yaws[i]) == k) for k in keys]
    fakes = synthesize(checkpoint, pairs.x[idx], seed=seed)
    np.save(out_path, fakes)
    click.echo(f"wrote {fakes.shape[0]} generated images to {out_path}")


@main.command("score")
@click.option("--dataset", "dataset_dir", required=True,
              type=click.Path(exists=True))
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True),
              help="Training output directory with checkpoints.")
@click.option("--out", "out_dir", default="realism_out", show_default=True)
@click.option("--dae-epochs", default=400, show_default=True)
@click.option("--seed", default=0, show_default=True)
def score_cmd(dataset_dir, run_dir, out_dir, dae_epochs, seed):
    """Train the realism autoencoder and score all checkpoints."""
    pairs = pair_dataset(dataset_dir)
    train_pairs = pairs.subset("train")
    test_pairs = pairs.subset("test")
    if test_pairs.n_pairs == 0:
        test_pairs = train_pairs
    checkpoints = {}
    for p in sorted(Path(run_dir).glob("checkpoint_*.pt")):
        checkpoints[int(p.stem.split("_")[1])] = p
    model = train_dae(train_pairs.y,
                      DaeConfig(epochs=dae_epochs, seed=seed))
    report = score_curve(model, checkpoints, test_pairs.x, test_pairs.y,
                         seed=seed, out_dir=out_dir)
    for name, score in report.rows():
        click.echo(f"{name}: {score:.3f}")


if __name__ == "__main__":
    main()
