"""Articulated human motion and ellipsoid scatterer tracks.

A skeleton is a joint tree with fixed offsets; bones are parent->child
segments carrying ellipsoid semi-axes. Clips come from mocap files (see
``twsim.bvh``) or from the built-in parametric gait generators. Forward
kinematics resampled at the radar rate yields per-bone centroid tracks
with aspect-dependent backscatter amplitudes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial.transform import Rotation

__all__ = [
    "Joint", "Bone", "Skeleton", "MotionClip", "ScattererTrack",
    "GaitParams", "MotionError",
    "default_skeleton", "generate_walk", "place_and_orient", "sample_tracks",
    "forward_kinematics", "ellipsoid_amplitude", "write_tracks_csv",
    "RADAR_SAMPLE_RATE", "CLIP_DURATION",
]

RADAR_SAMPLE_RATE = 500.0
CLIP_DURATION = 1.53

# Euler convention used throughout: intrinsic yaw-pitch-roll about the
# vertical (y), lateral (x) and forward (z) axes, in degrees.
EULER_ORDER = "YXZ"


class MotionError(Exception):
    pass


@dataclass(frozen=True)
class Joint:
    name: str
    parent: int  # -1 for the root
    offset: tuple[float, float, float]  # rest offset from parent, meters


@dataclass(frozen=True)
class Bone:
    name: str
    joint: int  # child-end joint; the bone spans parent(joint) -> joint
    radius: float  # transverse semi-axes (a = b)

    # the longitudinal semi-axis is half the rest bone length


@dataclass
class Skeleton:
    joints: list[Joint]
    bones: list[Bone]

    def validate(self) -> None:
        roots = [j for j in self.joints if j.parent < 0]
        if len(roots) != 1 or self.joints[0].parent != -1:
            raise MotionError("skeleton must have exactly one root at index 0")
        for idx, j in enumerate(self.joints[1:], start=1):
            if not (0 <= j.parent < idx):
                raise MotionError(
                    f"joint {j.name!r} has invalid/cyclic parent {j.parent}")
        for b in self.bones:
            if not (1 <= b.joint < len(self.joints)):
                raise MotionError(f"bone {b.name!r} references bad joint")
            if self.bone_length(b) <= 0:
                raise MotionError(f"bone {b.name!r} has zero length")

    def bone_length(self, bone: Bone) -> float:
        return float(np.linalg.norm(self.joints[bone.joint].offset))

    def semi_axes(self, bone: Bone) -> tuple[float, float, float]:
        return (bone.radius, bone.radius, self.bone_length(bone) / 2.0)

    @property
    def n_bones(self) -> int:
        return len(self.bones)


@dataclass
class MotionClip:
    """Per-frame root translation plus per-joint Euler rotations.

    ``root_pos``: (F, 3); ``rotations``: (F, J, 3) in EULER_ORDER degrees,
    where slot 0 holds the root orientation.
    """

    frame_rate: float
    root_pos: np.ndarray
    rotations: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.root_pos.shape[0]

    @property
    def duration(self) -> float:
        return self.n_frames / self.frame_rate

    def validate(self, skeleton: Skeleton | None = None) -> None:
        if self.root_pos.ndim != 2 or self.root_pos.shape[1] != 3:
            raise MotionError("root_pos must be (F, 3)")
        if self.rotations.shape[0] != self.n_frames or self.rotations.shape[2] != 3:
            raise MotionError("rotations must be (F, J, 3)")
        if skeleton is not None and self.rotations.shape[1] != len(skeleton.joints):
            raise MotionError("rotation channel count does not match skeleton")
        if not (np.all(np.isfinite(self.root_pos))
                and np.all(np.isfinite(self.rotations))):
            raise MotionError("non-finite channels")


@dataclass
class ScattererTrack:
    """Per-bone, per-sample geometry and backscatter amplitude.

    Shapes: positions (N, B, 3); rho (N, B, 2) ground-plane (x, z)
    projections; rho_dist and r and amplitude (N, B). ``r`` is the 3D
    distance to the radar, ``rho_dist`` the 2D distance from the radar's
    ground position to the projection.
    """

    bone_names: list[str]
    positions: np.ndarray
    rho: np.ndarray
    rho_dist: np.ndarray
    r: np.ndarray
    amplitude: np.ndarray
    sample_rate: float
    radar_pos: tuple[float, float, float]

    @property
    def n_samples(self) -> int:
        return self.positions.shape[0]

    @property
    def n_bones(self) -> int:
        return self.positions.shape[1]

    def subset(self, bones: list[int]) -> "ScattererTrack":
        return ScattererTrack(
            bone_names=[self.bone_names[b] for b in bones],
            positions=self.positions[:, bones],
            rho=self.rho[:, bones],
            rho_dist=self.rho_dist[:, bones],
            r=self.r[:, bones],
            amplitude=self.amplitude[:, bones],
            sample_rate=self.sample_rate,
            radar_pos=self.radar_pos,
        )


def default_skeleton(height: float = 1.75) -> Skeleton:
    """17-bone anthropometric skeleton, y-up, facing +z at rest."""
    s = height / 1.75
    J = [
        Joint("root", -1, (0.0, 0.95 * s, 0.0)),
        Joint("pelvis_end", 0, (0.0, -0.12 * s, 0.0)),
        Joint("spine", 0, (0.0, 0.22 * s, 0.0)),
        Joint("chest", 2, (0.0, 0.24 * s, 0.0)),
        Joint("neck", 3, (0.0, 0.10 * s, 0.0)),
        Joint("head_top", 4, (0.0, 0.22 * s, 0.0)),
        Joint("l_shoulder", 3, (0.21 * s, 0.03 * s, 0.0)),
        Joint("l_elbow", 6, (0.0, -0.30 * s, 0.0)),
        Joint("l_wrist", 7, (0.0, -0.26 * s, 0.0)),
        Joint("l_hand_tip", 8, (0.0, -0.17 * s, 0.0)),
        Joint("r_shoulder", 3, (-0.21 * s, 0.03 * s, 0.0)),
        Joint("r_elbow", 10, (0.0, -0.30 * s, 0.0)),
        Joint("r_wrist", 11, (0.0, -0.26 * s, 0.0)),
        Joint("r_hand_tip", 12, (0.0, -0.17 * s, 0.0)),
        Joint("l_hip", 0, (0.10 * s, -0.06 * s, 0.0)),
        Joint("l_knee", 14, (0.0, -0.42 * s, 0.0)),
        Joint("l_ankle", 15, (0.0, -0.40 * s, 0.0)),
        Joint("l_toe", 16, (0.0, -0.07 * s, 0.14 * s)),
        Joint("r_hip", 0, (-0.10 * s, -0.06 * s, 0.0)),
        Joint("r_knee", 18, (0.0, -0.42 * s, 0.0)),
        Joint("r_ankle", 19, (0.0, -0.40 * s, 0.0)),
        Joint("r_toe", 20, (0.0, -0.07 * s, 0.14 * s)),
    ]
    B = [
        Bone("pelvis", 1, 0.13 * s),
        Bone("torso_lower", 2, 0.13 * s),
        Bone("torso_upper", 3, 0.14 * s),
        Bone("neck", 4, 0.05 * s),
        Bone("head", 5, 0.09 * s),
        Bone("l_upper_arm", 7, 0.045 * s),
        Bone("l_forearm", 8, 0.04 * s),
        Bone("l_hand", 9, 0.035 * s),
        Bone("r_upper_arm", 11, 0.045 * s),
        Bone("r_forearm", 12, 0.04 * s),
        Bone("r_hand", 13, 0.035 * s),
        Bone("l_thigh", 15, 0.07 * s),
        Bone("l_shin", 16, 0.05 * s),
        Bone("l_foot", 17, 0.04 * s),
        Bone("r_thigh", 19, 0.07 * s),
        Bone("r_shin", 20, 0.05 * s),
        Bone("r_foot", 21, 0.04 * s),
    ]
    sk = Skeleton(joints=J, bones=B)
    sk.validate()
    return sk


def _euler_matrices(angles_deg: np.ndarray) -> np.ndarray:
    """(…, 3) Euler triples -> (…, 3, 3) rotation matrices."""
    flat = angles_deg.reshape(-1, 3)
    mats = Rotation.from_euler(EULER_ORDER, flat, degrees=True).as_matrix()
    return mats.reshape(angles_deg.shape[:-1] + (3, 3))


def forward_kinematics(skeleton: Skeleton, root_pos: np.ndarray,
                       rotations: np.ndarray) -> np.ndarray:
    """World joint positions, shape (F, J, 3), for per-frame channels."""
    F = root_pos.shape[0]
    J = len(skeleton.joints)
    mats = _euler_matrices(rotations)
    world_rot = np.empty((F, J, 3, 3))
    world_pos = np.empty((F, J, 3))
    world_rot[:, 0] = mats[:, 0]
    world_pos[:, 0] = root_pos
    for j in range(1, J):
        p = skeleton.joints[j].parent
        off = np.asarray(skeleton.joints[j].offset)
        world_rot[:, j] = world_rot[:, p] @ mats[:, j]
        world_pos[:, j] = world_pos[:, p] + np.einsum(
            "fab,b->fa", world_rot[:, p], off)
    return world_pos


@dataclass(frozen=True)
class GaitParams:
    speed: float = 1.2  # forward root speed, m/s
    leg_cycle_hz: float = 1.0
    hip_swing_deg: float = 28.0
    knee_flex_deg: float = 40.0
    arm_swing_deg: float = 32.0
    elbow_flex_deg: float = 20.0
    bob_amplitude: float = 0.025
    leap_height: float = 0.35
    leap_tuck_deg: float = 70.0


def generate_walk(kind: str = "walk", duration: float = CLIP_DURATION,
                  frame_rate: float = 120.0,
                  params: GaitParams = GaitParams(),
                  skeleton: Skeleton | None = None) -> tuple[Skeleton, MotionClip]:
    """Parametric gait: steady walk, or walk / leap / walk.

    The clip walks along +x from the origin; use :func:`place_and_orient`
    to position it in the scene. The leap occupies 0.6..1.0 s with its
    apex at 0.8 s.
    """
    if duration <= 0:
        raise MotionError("duration must be positive")
    if kind not in ("walk", "walk_leap_walk"):
        raise MotionError(f"unknown motion kind {kind!r}")
    sk = skeleton or default_skeleton()
    jidx = {j.name: k for k, j in enumerate(sk.joints)}
    F = round(duration * frame_rate)
    t = np.arange(F) / frame_rate
    J = len(sk.joints)
    root_pos = np.zeros((F, 3))
    rot = np.zeros((F, J, 3))

    rest_y = sk.joints[0].offset[1]
    w = 2 * np.pi * params.leg_cycle_hz
    phase = np.sin(w * t)
    # swing gate: knees flex mostly during the swing half of each cycle
    lift_l = np.clip(np.sin(w * t), 0.0, None)
    lift_r = np.clip(-np.sin(w * t), 0.0, None)

    root_pos[:, 0] = params.speed * t
    root_pos[:, 1] = rest_y + params.bob_amplitude * np.cos(2 * w * t)
    # body faces the direction of travel (+x); local forward is +z at rest
    rot[:, 0, 0] = 90.0

    rot[:, jidx["l_hip"], 1] = -params.hip_swing_deg * phase
    rot[:, jidx["r_hip"], 1] = params.hip_swing_deg * phase
    rot[:, jidx["l_knee"], 1] = params.knee_flex_deg * lift_l
    rot[:, jidx["r_knee"], 1] = params.knee_flex_deg * lift_r
    rot[:, jidx["l_shoulder"], 1] = params.arm_swing_deg * phase
    rot[:, jidx["r_shoulder"], 1] = -params.arm_swing_deg * phase
    rot[:, jidx["l_elbow"], 1] = -params.elbow_flex_deg * (1 + phase) / 2
    rot[:, jidx["r_elbow"], 1] = -params.elbow_flex_deg * (1 - phase) / 2

    if kind == "walk_leap_walk":
        t_leap0, t_apex, t_leap1 = 0.6, 0.8, 1.0
        in_leap = (t >= t_leap0) & (t <= t_leap1)
        u = np.zeros_like(t)
        u[in_leap] = 1.0 - ((t[in_leap] - t_apex) / (t_apex - t_leap0)) ** 2
        root_pos[:, 1] += params.leap_height * u
        # blend toward a tucked pose while airborne so channels stay continuous
        for side in ("l", "r"):
            hip, knee = jidx[f"{side}_hip"], jidx[f"{side}_knee"]
            rot[:, hip, 1] = (1 - u) * rot[:, hip, 1] - u * params.leap_tuck_deg
            rot[:, knee, 1] = (1 - u) * rot[:, knee, 1] + u * 1.6 * params.leap_tuck_deg
            rot[:, jidx[f"{side}_shoulder"], 1] *= (1 - u)

    clip = MotionClip(frame_rate=frame_rate, root_pos=root_pos, rotations=rot)
    clip.validate(sk)
    return sk, clip


def _ground_rotation(yaw_deg: float) -> np.ndarray:
    """3x3 rotation about the vertical mapping ground direction (1, 0) to
    (cos yaw, sin yaw) in the (x, z) plane."""
    c, s = np.cos(np.radians(yaw_deg)), np.sin(np.radians(yaw_deg))
    return np.array([[c, 0.0, -s],
                     [0.0, 1.0, 0.0],
                     [s, 0.0, c]])


def place_and_orient(clip: MotionClip, start: tuple[float, float],
                     yaw_deg: float,
                     bounds: tuple[tuple[float, float], tuple[float, float]] | None = None,
                     margin: float = 0.3) -> MotionClip:
    """Rigidly rotate the trajectory about the vertical axis and move its
    first frame's ground position to ``start`` = (x, z).

    ``bounds`` = ((x_min, x_max), (z_min, z_max)) rejects trajectories
    whose root leaves the usable interior.
    """
    if not np.isfinite(yaw_deg):
        raise MotionError("yaw must be finite")
    R = _ground_rotation(yaw_deg)
    p0 = clip.root_pos[0].copy()
    rel = clip.root_pos - p0
    new_pos = rel @ R.T
    new_pos[:, 0] += start[0]
    new_pos[:, 1] += p0[1]
    new_pos[:, 2] += start[1]

    rot = clip.rotations.copy()
    root_mats = _euler_matrices(rot[:, 0])
    new_root = Rotation.from_matrix(R[None] @ root_mats).as_euler(
        EULER_ORDER, degrees=True)
    rot[:, 0] = new_root

    if bounds is not None:
        (x0, x1), (z0, z1) = bounds
        x, z = new_pos[:, 0], new_pos[:, 2]
        if (x.min() < x0 + margin or x.max() > x1 - margin
                or z.min() < z0 + margin or z.max() > z1 - margin):
            raise MotionError("trajectory exits the usable interior")
    return MotionClip(frame_rate=clip.frame_rate, root_pos=new_pos,
                      rotations=rot)


def ellipsoid_amplitude(semi_axes: tuple[float, float, float],
                        cos_theta: np.ndarray) -> np.ndarray:
    """sqrt(RCS) of an ellipsoid under geometric optics.

    ``cos_theta`` is the cosine of the angle between the radar direction
    and the ellipsoid's long axis; the transverse semi-axes are equal so
    the azimuth drops out.
    """
    a, b, c = semi_axes
    sin2 = np.clip(1.0 - cos_theta ** 2, 0.0, 1.0)
    denom = a * a * sin2 + c * c * cos_theta ** 2
    sigma = np.pi * (a * b * c) ** 2 / denom ** 2
    return np.sqrt(sigma)


def _interp_channels(clip: MotionClip, t_out: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Linear per-channel interpolation of root position and Euler angles."""
    t_in = np.arange(clip.n_frames) / clip.frame_rate
    F, J, _ = clip.rotations.shape
    flat = clip.rotations.reshape(F, -1)
    out_rot = np.empty((t_out.size, flat.shape[1]))
    for k in range(flat.shape[1]):
        out_rot[:, k] = np.interp(t_out, t_in, flat[:, k])
    out_pos = np.empty((t_out.size, 3))
    for k in range(3):
        out_pos[:, k] = np.interp(t_out, t_in, clip.root_pos[:, k])
    return out_pos, out_rot.reshape(t_out.size, J, 3)


def sample_tracks(skeleton: Skeleton, clip: MotionClip,
                  radar_pos: tuple[float, float, float] = (0.0, 0.5, 0.5),
                  fs: float = RADAR_SAMPLE_RATE,
                  duration: float = CLIP_DURATION,
                  bounds: tuple[tuple[float, float], tuple[float, float]] | None = None,
                  ) -> ScattererTrack:
    """Resample the clip at the radar rate and emit per-bone scatterer
    geometry and amplitudes."""
    skeleton.validate()
    clip.validate(skeleton)
    if clip.duration + 0.5 / clip.frame_rate < duration:
        raise MotionError(
            f"clip covers {clip.duration:.3f} s < required {duration} s")
    n = round(duration * fs)
    t = np.arange(n) / fs
    t = np.minimum(t, clip.duration - 1e-12)
    pos, rot = _interp_channels(clip, t)
    joints = forward_kinematics(skeleton, pos, rot)

    radar = np.asarray(radar_pos)
    B = skeleton.n_bones
    centroids = np.empty((n, B, 3))
    amps = np.empty((n, B))
    for b, bone in enumerate(skeleton.bones):
        child = joints[:, bone.joint]
        parent = joints[:, skeleton.joints[bone.joint].parent]
        centroids[:, b] = 0.5 * (child + parent)
        axis = child - parent
        axis /= np.linalg.norm(axis, axis=1, keepdims=True)
        to_radar = radar - centroids[:, b]
        to_radar /= np.linalg.norm(to_radar, axis=1, keepdims=True)
        cos_theta = np.abs(np.sum(axis * to_radar, axis=1))
        amps[:, b] = ellipsoid_amplitude(skeleton.semi_axes(bone), cos_theta)

    if bounds is not None:
        (x0, x1), (z0, z1) = bounds
        bad = ((centroids[:, :, 0] < x0) | (centroids[:, :, 0] > x1)
               | (centroids[:, :, 2] < z0) | (centroids[:, :, 2] > z1))
        if bad.any():
            idx = int(np.argwhere(bad)[0][0])
            raise MotionError(f"scatterer outside interior at sample {idx}")

    rho = centroids[:, :, [0, 2]]
    radar_xz = radar[[0, 2]]
    rho_dist = np.linalg.norm(rho - radar_xz, axis=2)
    r = np.linalg.norm(centroids - radar, axis=2)
    return ScattererTrack(
        bone_names=[b.name for b in skeleton.bones],
        positions=centroids, rho=rho, rho_dist=rho_dist, r=r,
        amplitude=amps, sample_rate=fs, radar_pos=tuple(radar_pos))


def write_tracks_csv(track: ScattererTrack, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "bone_id", "x", "y", "z", "rho_x", "rho_z", "r", "a"])
        for n in range(track.n_samples):
            t = n / track.sample_rate
            for b in range(track.n_bones):
                p = track.positions[n, b]
                w.writerow([f"{t:.6f}", track.bone_names[b],
                            f"{p[0]:.6f}", f"{p[1]:.6f}", f"{p[2]:.6f}",
                            f"{track.rho[n, b, 0]:.6f}", f"{track.rho[n, b, 1]:.6f}",
                            f"{track.r[n, b]:.6f}", f"{track.amplitude[n, b]:.6e}"])
