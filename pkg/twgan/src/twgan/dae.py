"""Denoising-autoencoder realism scoring.

The autoencoder trains on real through-wall images corrupted with
additive Gaussian noise against clean targets under MSE. An image's
realism error is its 4096-pixel squared reconstruction residual; a set's
score is the mean over images. Scores fall as generator checkpoints
improve, and uniform noise provides the reference bad score.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .models import Dae
from .train import load_generator, synthesize

__all__ = ["DaeConfig", "DaeError", "RealismReport", "train_dae",
           "realism_error", "score_curve"]


class DaeError(Exception):
    pass


@dataclass(frozen=True)
class DaeConfig:
    sigma: float = 0.1
    epochs: int = 400
    batch_size: int = 64
    learning_rate: float = 1e-3
    seed: int = 0


@dataclass
class RealismReport:
    checkpoint_scores: dict[int, float]
    real_baseline: float
    noise_baseline: float
    per_image: dict[int, np.ndarray] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, float]]:
        out = [(f"checkpoint_{e}", s)
               for e, s in sorted(self.checkpoint_scores.items())]
        out.append(("real_heldout", self.real_baseline))
        out.append(("uniform_noise", self.noise_baseline))
        return out


def train_dae(images: np.ndarray, config: DaeConfig = DaeConfig()) -> Dae:
    """Train on (N, 64, 64) real images in [0, 1]; targets stay clean
    while inputs are corrupted with N(0, sigma^2) noise."""
    if images.ndim != 3 or images.shape[1:] != (64, 64):
        raise DaeError(f"expected (N, 64, 64) images, got {images.shape}")
    if images.shape[0] == 0:
        raise DaeError("no training images")
    torch.manual_seed(config.seed)
    model = Dae()
    opt = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    mse = nn.MSELoss()
    clean = torch.from_numpy(np.ascontiguousarray(images, dtype=np.float32))
    clean = clean.unsqueeze(1)
    n = clean.shape[0]
    for epoch in range(config.epochs):
        perm = torch.randperm(n)
        for lo in range(0, n, config.batch_size):
            idx = perm[lo:lo + config.batch_size]
            target = clean[idx]
            noisy = target + config.sigma * torch.randn_like(target)
            loss = mse(model(noisy), target)
            if not torch.isfinite(loss):
                raise DaeError(f"non-finite loss at epoch {epoch + 1}")
            opt.zero_grad()
            loss.backward()
            opt.step()
    model.eval()
    return model


def realism_error(model: Dae, images: np.ndarray
                  ) -> tuple[float, np.ndarray]:
    """Mean and per-image squared L2 reconstruction error (sum over the
    4096 pixels) of the uncorrupted images."""
    if images.ndim == 2:
        images = images[None]
    if images.shape[1:] != (64, 64):
        raise DaeError(f"expected (N, 64, 64) images, got {images.shape}")
    x = torch.from_numpy(np.ascontiguousarray(images, dtype=np.float32))
    x = x.unsqueeze(1)
    with torch.no_grad():
        recon = model(x)
    per_image = ((recon - x) ** 2).sum(dim=(1, 2, 3)).numpy()
    return float(per_image.mean()), per_image


def score_curve(model: Dae, checkpoints: dict[int, Path],
                free_inputs: np.ndarray, real_heldout: np.ndarray,
                seed: int = 0, out_dir=None) -> RealismReport:
    """Score generated images from each checkpoint plus real and
    uniform-noise baselines; optionally write CSV and a curve PNG."""
    if len(checkpoints) < 2:
        raise DaeError("need at least two checkpoints for a curve")
    for epoch, path in checkpoints.items():
        if not Path(path).exists():
            raise DaeError(f"missing checkpoint for epoch {epoch}: {path}")
    scores: dict[int, float] = {}
    per_image: dict[int, np.ndarray] = {}
    for epoch in sorted(checkpoints):
        fakes = synthesize(checkpoints[epoch], free_inputs, seed=seed)
        scores[epoch], per_image[epoch] = realism_error(model, fakes)
    real_score, _ = realism_error(model, real_heldout)
    rng = np.random.default_rng(seed)
    noise = rng.random((free_inputs.shape[0], 64, 64)).astype(np.float32)
    noise_score, _ = realism_error(model, noise)
    report = RealismReport(checkpoint_scores=scores,
                           real_baseline=real_score,
                           noise_baseline=noise_score,
                           per_image=per_image)
    if out_dir is not None:
        _write_report(report, Path(out_dir))
    return report


def _write_report(report: RealismReport, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "realism.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["series", "score"])
        for name, score in report.rows():
            w.writerow([name, f"{score:.6f}"])

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    epochs = sorted(report.checkpoint_scores)
    vals = [report.checkpoint_scores[e] for e in epochs]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(epochs, vals, "o-", label="generated")
    ax.axhline(report.real_baseline, color="g", ls="--", label="real held-out")
    ax.axhline(report.noise_baseline, color="r", ls=":",
               label="uniform noise")
    ax.set_xlabel("generator checkpoint (epochs)")
    ax.set_ylabel("mean squared L2 reconstruction error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "realism.png", dpi=130)
    plt.close(fig)
