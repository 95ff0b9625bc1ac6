"""Generator, critic and denoising autoencoder for 64x64 spectrograms.

The generator upsamples the (image, noise) pair twice with stride-2
transposed convolutions, pools back down through two plain convolutions,
and finishes with a stride-1 4x4 transposed convolution under a sigmoid:
64 -> 128 -> 256 -> 128 -> 64 -> 64 with "same" spatial behavior. The
critic is three stride-2 3x3 convolutions (64/128/256 filters) into a
single sigmoid unit.
"""

from __future__ import annotations

import torch
import torch.nn.functional as F
from torch import nn

__all__ = ["Generator", "Critic", "Dae", "IMAGE_SIZE"]

IMAGE_SIZE = 64


class Generator(nn.Module):
    """Maps (N, 2, 64, 64) image-plus-noise input to (N, 1, 64, 64) in
    (0, 1).

    ``width`` scales every free channel count (the spec'd sizes at
    width=1); useful for cheap gradient checks.
    """

    def __init__(self, width: float = 1.0, decoder_channels=(8, 8)):
        super().__init__()
        c1 = max(1, round(32 * width))
        c2 = max(1, round(64 * width))
        d1 = max(1, round(decoder_channels[0] * width))
        d2 = max(1, round(decoder_channels[1] * width))
        self.up1 = nn.ConvTranspose2d(2, c1, kernel_size=2, stride=2)
        self.bn1 = nn.BatchNorm2d(c1)
        self.up2 = nn.ConvTranspose2d(c1, c2, kernel_size=2, stride=2)
        self.bn2 = nn.BatchNorm2d(c2)
        self.conv1 = nn.Conv2d(c2, d1, kernel_size=3, padding=1)
        self.bn3 = nn.BatchNorm2d(d1)
        self.conv2 = nn.Conv2d(d1, d2, kernel_size=3, padding=1)
        self.bn4 = nn.BatchNorm2d(d2)
        self.out = nn.ConvTranspose2d(d2, 1, kernel_size=4, stride=1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4 or x.shape[1] != 2 or x.shape[2:] != (64, 64):
            raise ValueError(f"expected (N, 2, 64, 64) input, got "
                             f"{tuple(x.shape)}")
        x = self.bn1(F.relu(self.up1(x)))        # (N, 32, 128, 128)
        x = self.bn2(F.relu(self.up2(x)))        # (N, 64, 256, 256)
        x = F.max_pool2d(self.bn3(F.relu(self.conv1(x))), 2)  # 128
        x = F.max_pool2d(self.bn4(F.relu(self.conv2(x))), 2)  # 64
        x = self.out(x)[:, :, 1:65, 1:65]        # crop 67 -> 64 ("same")
        return torch.sigmoid(x)


class Critic(nn.Module):
    """Maps (N, 1, 64, 64) images to a per-image score in (0, 1)."""

    def __init__(self, width: float = 1.0):
        super().__init__()
        c1 = max(1, round(64 * width))
        c2 = max(1, round(128 * width))
        c3 = max(1, round(256 * width))
        self.conv1 = nn.Conv2d(1, c1, kernel_size=3, stride=2, padding=1)
        self.conv2 = nn.Conv2d(c1, c2, kernel_size=3, stride=2, padding=1)
        self.conv3 = nn.Conv2d(c2, c3, kernel_size=3, stride=2, padding=1)
        self.fc = nn.Linear(c3 * 8 * 8, 1)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4 or x.shape[1] != 1 or x.shape[2:] != (64, 64):
            raise ValueError(f"expected (N, 1, 64, 64) input, got "
                             f"{tuple(x.shape)}")
        x = F.relu(self.conv1(x))
        x = F.relu(self.conv2(x))
        x = F.relu(self.conv3(x))
        x = self.fc(x.flatten(1))
        return torch.sigmoid(x).squeeze(1)


class Dae(nn.Module):
    """Denoising autoencoder: 16/32/64 stride-2 encoder with a mirrored
    transposed-convolution decoder and sigmoid output."""

    def __init__(self):
        super().__init__()
        self.enc = nn.Sequential(
            nn.Conv2d(1, 16, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(16, 32, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(32, 64, 3, stride=2, padding=1), nn.ReLU(),
        )
        self.dec = nn.Sequential(
            nn.ConvTranspose2d(64, 32, 2, stride=2), nn.ReLU(),
            nn.ConvTranspose2d(32, 16, 2, stride=2), nn.ReLU(),
            nn.ConvTranspose2d(16, 1, 2, stride=2),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.dim() != 4 or x.shape[1] != 1 or x.shape[2:] != (64, 64):
            raise ValueError(f"expected (N, 1, 64, 64) input, got "
                             f"{tuple(x.shape)}")
        return torch.sigmoid(self.dec(self.enc(x)))
