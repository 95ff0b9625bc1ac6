"""Learning stage for micro-Doppler signature synthesis.

Trains a GAN that translates free-space 64x64 spectrogram images into
through-wall ones (:mod:`twgan.models`, :mod:`twgan.train`) and scores
generated images with a denoising-autoencoder reconstruction error
(:mod:`twgan.dae`). Consumes only the simulation toolkit's exported
files: ``.twmd`` images and the dataset ``manifest.json``.
"""

__version__ = "0.1.0"
