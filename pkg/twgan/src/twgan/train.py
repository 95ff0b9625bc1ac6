"""Adversarial training loop and checkpointed synthesis.

Alternates one critic step (real targets labeled 1, generated images
labeled 0) and one generator step (push the critic's score on generated
images toward 1) per batch under binary cross-entropy, Adam 2e-4 with
betas (0.5, 0.999). Noise is a fresh per-sample 64x64 standard Gaussian
channel concatenated to the free-space input.

Runs are resumable: a rolling state file carries model, optimizer and
RNG state, and completed runs are recognized by their configuration hash
so repeated calls reuse the artifacts.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .models import Critic, Generator

__all__ = ["TrainConfig", "TrainError", "TrainResult", "train", "synthesize",
           "load_generator"]

CHANNELS_LAST = torch.channels_last


class TrainError(Exception):
    pass


@dataclass(frozen=True)
class TrainConfig:
    out_dir: str
    epochs: int = 1000
    batch_size: int = 64
    learning_rate: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    seed: int = 0
    checkpoint_epochs: tuple[int, ...] = (250, 500, 750, 1000)
    state_every: int = 25  # rolling resume-state interval, epochs

    def validate(self) -> None:
        if self.epochs <= 0 or self.batch_size <= 0:
            raise TrainError("epochs and batch size must be positive")
        if self.learning_rate <= 0:
            raise TrainError("learning rate must be positive")
        if any(e <= 0 or e > self.epochs for e in self.checkpoint_epochs):
            raise TrainError("checkpoint epochs must lie within the run")


@dataclass
class TrainResult:
    checkpoints: dict[int, Path]
    log_path: Path
    seconds: float


def _config_hash(cfg: TrainConfig, x: np.ndarray, y: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(asdict(cfg), sort_keys=True).encode())
    h.update(np.ascontiguousarray(x).tobytes())
    h.update(np.ascontiguousarray(y).tobytes())
    return h.hexdigest()[:16]


def _to_torch(a: np.ndarray) -> torch.Tensor:
    t = torch.from_numpy(np.ascontiguousarray(a, dtype=np.float32))
    return t.unsqueeze(1).to(memory_format=CHANNELS_LAST)


def _checkpoint_path(out: Path, epoch: int) -> Path:
    return out / f"checkpoint_{epoch:04d}.pt"


def _save_sample_grid(fakes: torch.Tensor, targets: torch.Tensor,
                      path: Path) -> None:
    """Top row generated, bottom row target, first 8 pairs."""
    from PIL import Image

    n = min(8, fakes.shape[0])
    rows = []
    for src in (fakes, targets):
        tiles = [src[i, 0].detach().numpy() for i in range(n)]
        rows.append(np.concatenate(tiles, axis=1))
    grid = (np.concatenate(rows, axis=0) * 255).clip(0, 255).astype(np.uint8)
    Image.fromarray(grid, mode="L").save(path)


def train(x: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> TrainResult:
    """Train on (N, 64, 64) free-space inputs x and through-wall targets
    y; write checkpoints, sample grids and a per-epoch CSV loss log."""
    cfg.validate()
    if x.shape != y.shape or x.ndim != 3 or x.shape[1:] != (64, 64):
        raise TrainError(f"expected matching (N, 64, 64) arrays, got "
                         f"{x.shape} / {y.shape}")
    if x.shape[0] == 0:
        raise TrainError("no training pairs")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    run_hash = _config_hash(cfg, x, y)
    meta_path = out / "run.json"
    log_path = out / "loss_log.csv"
    state_path = out / "state.pt"

    want = sorted(set(cfg.checkpoint_epochs))
    if meta_path.exists():
        meta = json.loads(meta_path.read_text())
        if meta.get("hash") != run_hash:
            raise TrainError(f"{out} holds a different run "
                             f"(hash {meta.get('hash')} != {run_hash})")
        if meta.get("completed") and all(
                _checkpoint_path(out, e).exists() for e in want):
            return TrainResult(
                checkpoints={e: _checkpoint_path(out, e) for e in want},
                log_path=log_path, seconds=meta.get("seconds", 0.0))
    else:
        meta_path.write_text(json.dumps({"hash": run_hash,
                                         "completed": False}))

    torch.manual_seed(cfg.seed)
    gen = Generator().to(memory_format=CHANNELS_LAST)
    critic = Critic().to(memory_format=CHANNELS_LAST)
    frozen = Critic().to(memory_format=CHANNELS_LAST)
    frozen.load_state_dict(critic.state_dict())
    frozen.eval()
    opt_g = torch.optim.Adam(gen.parameters(), lr=cfg.learning_rate,
                             betas=(cfg.beta1, cfg.beta2))
    opt_c = torch.optim.Adam(critic.parameters(), lr=cfg.learning_rate,
                             betas=(cfg.beta1, cfg.beta2))
    bce = nn.BCELoss()

    start_epoch = 0
    elapsed = 0.0
    if state_path.exists():
        state = torch.load(state_path, weights_only=False)
        gen.load_state_dict(state["generator"])
        critic.load_state_dict(state["critic"])
        frozen.load_state_dict(state["frozen"])
        opt_g.load_state_dict(state["opt_g"])
        opt_c.load_state_dict(state["opt_c"])
        torch.set_rng_state(state["rng"])
        start_epoch = state["epoch"]
        elapsed = state["seconds"]

    xt = _to_torch(x)
    yt = _to_torch(y)
    n = xt.shape[0]

    if start_epoch == 0:
        with open(log_path, "w", newline="") as f:
            csv.writer(f).writerow(
                ["epoch", "d_loss_real", "d_loss_fake", "g_loss",
                 "g_loss_frozen", "l1_to_target", "seconds"])

    for epoch in range(start_epoch, cfg.epochs):
        t0 = time.time()
        perm = torch.randperm(n)
        sums = np.zeros(5)
        batches = 0
        last_fakes = None
        for lo in range(0, n, cfg.batch_size):
            idx = perm[lo:lo + cfg.batch_size]
            xb, yb = xt[idx], yt[idx]
            noise = torch.randn(xb.shape[0], 1, 64, 64)
            gin = torch.cat([xb, noise], dim=1).to(memory_format=CHANNELS_LAST)

            # critic: real targets toward 1, generated toward 0
            fakes = gen(gin)
            d_real = bce(critic(yb), torch.ones(xb.shape[0]))
            d_fake = bce(critic(fakes.detach()), torch.zeros(xb.shape[0]))
            opt_c.zero_grad()
            (d_real + d_fake).backward()
            opt_c.step()

            # generator: push the critic's verdict on fakes toward 1
            g_loss = bce(critic(fakes), torch.ones(xb.shape[0]))
            opt_g.zero_grad()
            g_loss.backward()
            opt_g.step()

            with torch.no_grad():
                g_frozen = bce(frozen(fakes), torch.ones(xb.shape[0]))
                l1 = (fakes - yb).abs().mean()
            vals = [d_real.item(), d_fake.item(), g_loss.item(),
                    g_frozen.item(), l1.item()]
            if not all(np.isfinite(vals)):
                raise TrainError(f"non-finite loss at epoch {epoch + 1}, "
                                 f"batch {batches}: {vals}")
            sums += vals
            batches += 1
            last_fakes = fakes
        elapsed += time.time() - t0

        means = sums / batches
        with open(log_path, "a", newline="") as f:
            csv.writer(f).writerow(
                [epoch + 1] + [f"{v:.6f}" for v in means]
                + [f"{elapsed:.2f}"])

        if (epoch + 1) in want:
            torch.save({"generator": gen.state_dict(),
                        "critic": critic.state_dict(),
                        "epoch": epoch + 1, "config": asdict(cfg)},
                       _checkpoint_path(out, epoch + 1))
            _save_sample_grid(last_fakes, yt[perm[-last_fakes.shape[0]:]],
                              out / f"samples_{epoch + 1:04d}.png")
        if (epoch + 1) % cfg.state_every == 0 or (epoch + 1) == cfg.epochs:
            torch.save({"generator": gen.state_dict(),
                        "critic": critic.state_dict(),
                        "frozen": frozen.state_dict(),
                        "opt_g": opt_g.state_dict(),
                        "opt_c": opt_c.state_dict(),
                        "rng": torch.get_rng_state(),
                        "epoch": epoch + 1, "seconds": elapsed}, state_path)

    meta_path.write_text(json.dumps({"hash": run_hash, "completed": True,
                                     "seconds": elapsed}))
    return TrainResult(checkpoints={e: _checkpoint_path(out, e) for e in want},
                       log_path=log_path, seconds=elapsed)


def load_generator(checkpoint_path) -> Generator:
    state = torch.load(checkpoint_path, weights_only=False)
    if "generator" not in state:
        raise TrainError(f"{checkpoint_path} is not a training checkpoint")
    gen = Generator()
    gen.load_state_dict(state["generator"])
    gen.eval()
    return gen


def synthesize(checkpoint_path, x: np.ndarray, seed: int = 0) -> np.ndarray:
    """Generate through-wall images for (N, 64, 64) or (64, 64) free-space
    inputs; deterministic given (checkpoint, x, seed)."""
    gen = load_generator(checkpoint_path)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.shape[1:] != (64, 64):
        raise TrainError(f"expected (N, 64, 64) inputs, got {x.shape}")
    rng = torch.Generator().manual_seed(seed)
    xt = _to_torch(x)
    noise = torch.randn(x.shape[0], 1, 64, 64, generator=rng)
    with torch.no_grad():
        fakes = gen(torch.cat([xt, noise], dim=1)
                    .to(memory_format=CHANNELS_LAST))
    out = fakes[:, 0].numpy()
    return out[0] if single else out
