"""Through-wall radar micro-Doppler simulation toolkit.

Subpackages cover 2D FDTD wall propagation (:mod:`twsim.fdtd`), the wall
case catalog (:mod:`twsim.walls`), human motion and scatterer tracks
(:mod:`twsim.motion`, :mod:`twsim.bvh`), baseband synthesis
(:mod:`twsim.radar`), spectrogram processing (:mod:`twsim.doppler`) and
the dataset pipeline (:mod:`twsim.pipeline`).
"""

__version__ = "0.1.0"
