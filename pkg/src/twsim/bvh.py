"""Parser for hierarchical skeleton/channel mocap text files (BVH).

Maps the file's joint tree onto :class:`twsim.motion.Skeleton` and its
per-frame channels onto a :class:`twsim.motion.MotionClip`. Rotation
channels in arbitrary axis order are converted to the toolkit's Euler
convention frame by frame. Offsets are interpreted in meters unless a
``scale`` is given (mocap archives are frequently in centimeters or
inches).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

from .motion import (EULER_ORDER, Bone, Joint, MotionClip, MotionError,
                     Skeleton)

__all__ = ["parse_motion_file", "BvhError"]


class BvhError(MotionError):
    pass


_AXIS = {"Xrotation": "x", "Yrotation": "y", "Zrotation": "z"}
_POS = {"Xposition": 0, "Yposition": 1, "Zposition": 2}


def _default_radius(length: float) -> float:
    return float(np.clip(0.25 * length, 0.03, 0.14))


def parse_motion_file(data: bytes | str, scale: float = 1.0
                      ) -> tuple[Skeleton, MotionClip]:
    """Parse BVH text into a skeleton and a motion clip.

    Raises :class:`BvhError` on malformed hierarchies, bad channel counts
    or cyclic parent references.
    """
    text = data.decode() if isinstance(data, (bytes, bytearray)) else data
    tokens = text.split()
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise BvhError("unexpected end of file")
        tok = tokens[pos]
        pos += 1
        if expected is not None and tok.upper() != expected.upper():
            raise BvhError(f"expected {expected!r}, got {tok!r}")
        return tok

    joints: list[Joint] = []
    channels: list[list[str]] = []  # per joint, in file order

    def parse_joint(parent: int, name: str, is_end: bool):
        take("{")
        take("OFFSET")
        off = tuple(float(take()) * scale for _ in range(3))
        idx = len(joints)
        joints.append(Joint(name=name, parent=parent, offset=off))
        chans: list[str] = []
        if not is_end:
            if peek() and peek().upper() == "CHANNELS":
                take()
                n = int(take())
                chans = [take() for _ in range(n)]
        channels.append(chans)
        while True:
            tok = peek()
            if tok is None:
                raise BvhError("unterminated joint block")
            if tok == "}":
                take()
                return
            kw = take()
            if kw.upper() == "JOINT":
                parse_joint(idx, take(), False)
            elif kw.upper() == "END":
                site = take()  # "Site"
                parse_joint(idx, f"{name}_{site.lower()}", True)
            else:
                raise BvhError(f"unexpected token {kw!r} in joint block")

    take("HIERARCHY")
    take("ROOT")
    parse_joint(-1, take(), False)
    if peek() is None or peek().upper() != "MOTION":
        raise BvhError("missing MOTION section")
    take("MOTION")
    take("Frames:")
    n_frames = int(take())
    take("Frame")
    take("Time:")
    frame_time = float(take())
    if frame_time <= 0:
        raise BvhError("non-positive frame time")

    n_channels = sum(len(c) for c in channels)
    values = tokens[pos:]
    if len(values) != n_frames * n_channels:
        raise BvhError(
            f"channel data has {len(values)} values, expected "
            f"{n_frames} x {n_channels}")
    frames = np.array(values, dtype=float).reshape(n_frames, n_channels)

    skeleton = _build_skeleton(joints)
    clip = _build_clip(joints, channels, frames, frame_time, scale)
    clip.validate(skeleton)
    return skeleton, clip


def _build_skeleton(joints: list[Joint]) -> Skeleton:
    bones = []
    for idx, j in enumerate(joints):
        if j.parent < 0:
            continue
        length = float(np.linalg.norm(j.offset))
        if length <= 0:
            continue  # zero-offset helper joints carry no scatterer
        bones.append(Bone(name=j.name, joint=idx,
                          radius=_default_radius(length)))
    sk = Skeleton(joints=joints, bones=bones)
    sk.validate()
    return sk


def _build_clip(joints, channels, frames, frame_time, scale) -> MotionClip:
    F = frames.shape[0]
    J = len(joints)
    root_pos = np.zeros((F, 3))
    rotations = np.zeros((F, J, 3))
    col = 0
    for jidx in range(J):
        chans = channels[jidx]
        rot_axes = ""
        rot_cols = []
        for ch in chans:
            if ch in _POS:
                if jidx == 0:
                    root_pos[:, _POS[ch]] = frames[:, col] * scale
                # translation channels on non-root joints are ignored
            elif ch in _AXIS:
                rot_axes += _AXIS[ch]
                rot_cols.append(col)
            else:
                raise BvhError(f"unknown channel {ch!r}")
            col += 1
        if rot_cols:
            angles = frames[:, rot_cols]
            # intrinsic rotation in the file's own axis order
            mats = Rotation.from_euler(rot_axes.upper(), angles, degrees=True)
            rotations[:, jidx] = mats.as_euler(EULER_ORDER, degrees=True)
    return MotionClip(frame_rate=1.0 / frame_time, root_pos=root_pos,
                      rotations=rotations)
