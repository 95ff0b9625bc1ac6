import numpy as np
import pytest

from twsim.motion import (CLIP_DURATION, GaitParams, Joint, MotionClip,
                          MotionError, Skeleton, default_skeleton,
                          ellipsoid_amplitude, forward_kinematics,
                          generate_walk, place_and_orient, sample_tracks,
                          write_tracks_csv, _ground_rotation,
                          _interp_channels)


def test_default_skeleton_shape():
    sk = default_skeleton()
    assert len(sk.joints) == 22
    assert sk.n_bones == 17
    sk.validate()


def test_skeleton_height_scaling():
    short = default_skeleton(height=1.60)
    tall = default_skeleton(height=1.90)
    ratio = 1.90 / 1.60
    for bs, bt in zip(short.bones, tall.bones):
        assert tall.bone_length(bt) == pytest.approx(
            ratio * short.bone_length(bs))


def test_skeleton_rejects_forward_references():
    joints = [Joint("root", -1, (0.0, 1.0, 0.0)),
              Joint("a", 2, (0.0, 0.1, 0.0)),
              Joint("b", 1, (0.0, 0.1, 0.0))]
    with pytest.raises(MotionError):
        Skeleton(joints=joints, bones=[]).validate()


def test_skeleton_requires_single_root():
    joints = [Joint("a", -1, (0.0, 1.0, 0.0)),
              Joint("b", -1, (0.0, 1.0, 0.0))]
    with pytest.raises(MotionError):
        Skeleton(joints=joints, bones=[]).validate()


def test_generate_walk_frames_and_advance():
    sk, clip = generate_walk("walk")
    assert clip.n_frames == round(CLIP_DURATION * 120)
    assert clip.duration >= CLIP_DURATION
    adv = clip.root_pos[-1, 0] - clip.root_pos[0, 0]
    expected = 1.2 * (clip.n_frames - 1) / clip.frame_rate
    assert adv == pytest.approx(expected)
    assert np.allclose(clip.root_pos[:, 2], 0.0)


def test_generate_walk_rejects_bad_input():
    with pytest.raises(MotionError):
        generate_walk("run")
    with pytest.raises(MotionError):
        generate_walk("walk", duration=-1.0)


def test_static_gait_freezes_the_body():
    params = GaitParams(speed=0.0, hip_swing_deg=0.0, knee_flex_deg=0.0,
                        arm_swing_deg=0.0, elbow_flex_deg=0.0,
                        bob_amplitude=0.0)
    sk, clip = generate_walk("walk", params=params)
    joints = forward_kinematics(sk, clip.root_pos, clip.rotations)
    assert np.allclose(joints, joints[0], atol=1e-12)


def test_leap_has_single_apex_inside_window():
    sk, clip = generate_walk("walk_leap_walk")
    _, walk_clip = generate_walk("walk")
    t = np.arange(clip.n_frames) / clip.frame_rate
    lift = clip.root_pos[:, 1] - walk_clip.root_pos[:, 1]
    apex = t[np.argmax(lift)]
    assert 0.6 <= apex <= 1.0
    assert lift.max() == pytest.approx(GaitParams().leap_height, rel=0.05)
    outside = (t < 0.6) | (t > 1.0)
    assert np.allclose(lift[outside], 0.0, atol=1e-12)


def test_leap_channels_are_continuous():
    sk, clip = generate_walk("walk_leap_walk")
    step = np.abs(np.diff(clip.rotations, axis=0)).max()
    # per-frame angle increments stay bounded (no teleporting joints)
    assert step < 20.0


def test_forward_kinematics_preserves_bone_lengths():
    sk, clip = generate_walk("walk_leap_walk")
    joints = forward_kinematics(sk, clip.root_pos, clip.rotations)
    for bone in sk.bones:
        child = joints[:, bone.joint]
        parent = joints[:, sk.joints[bone.joint].parent]
        lengths = np.linalg.norm(child - parent, axis=1)
        rest = sk.bone_length(bone)
        assert np.max(np.abs(lengths - rest)) / rest < 1e-6


def test_place_identity():
    sk, clip = generate_walk("walk")
    placed = place_and_orient(clip, (0.0, 3.0), 0.0)
    assert placed.root_pos[0, 0] == pytest.approx(0.0)
    assert placed.root_pos[0, 2] == pytest.approx(3.0)
    assert np.allclose(placed.root_pos[:, 1], clip.root_pos[:, 1])


def test_place_rotates_trajectory_exactly():
    sk, clip = generate_walk("walk")
    for yaw in (0.0, 15.0, 30.0, 45.0):
        placed = place_and_orient(clip, (0.5, 3.0), yaw)
        R = _ground_rotation(yaw)
        rel = clip.root_pos - clip.root_pos[0]
        expected = rel @ R.T
        got = placed.root_pos - placed.root_pos[0]
        assert np.max(np.abs(got - expected)) < 1e-9


def test_place_preserves_pose_rigidly():
    """Rotating and translating the clip must preserve every inter-joint
    distance in every frame."""
    sk, clip = generate_walk("walk")
    placed = place_and_orient(clip, (0.5, 2.0), 30.0)
    a = forward_kinematics(sk, clip.root_pos, clip.rotations)
    b = forward_kinematics(sk, placed.root_pos, placed.rotations)
    for f in (0, clip.n_frames // 2, clip.n_frames - 1):
        da = np.linalg.norm(a[f][:, None] - a[f][None, :], axis=2)
        db = np.linalg.norm(b[f][:, None] - b[f][None, :], axis=2)
        assert np.max(np.abs(da - db)) < 1e-9


def test_place_rejects_escaping_trajectory():
    sk, clip = generate_walk("walk")
    with pytest.raises(MotionError):
        place_and_orient(clip, (0.0, 3.0), 0.0,
                         bounds=((-1.0, 1.0), (0.0, 6.5)))


def test_sphere_amplitude():
    r = 0.1
    cos = np.array([0.0, 0.3, 0.7, 1.0])
    amp = ellipsoid_amplitude((r, r, r), cos)
    assert np.allclose(amp, np.sqrt(np.pi) * r)


def test_prolate_amplitude_largest_broadside():
    axes = (0.05, 0.05, 0.2)
    cos = np.linspace(0.0, 1.0, 50)
    amp = ellipsoid_amplitude(axes, cos)
    assert np.all(np.diff(amp) < 0)
    assert amp[0] == pytest.approx(np.sqrt(np.pi) * axes[2])


def test_interp_reproduces_native_frames():
    sk, clip = generate_walk("walk")
    t = np.arange(clip.n_frames) / clip.frame_rate
    pos, rot = _interp_channels(clip, t)
    assert np.allclose(pos, clip.root_pos, atol=1e-12)
    assert np.allclose(rot, clip.rotations, atol=1e-12)


def test_sample_tracks_shapes(walk_track):
    sk, track = walk_track
    assert track.n_samples == 765
    assert track.n_bones == 17
    assert track.positions.shape == (765, 17, 3)
    assert track.rho.shape == (765, 17, 2)
    assert track.sample_rate == 500.0


def test_track_projection_consistency(walk_track):
    """rho is the ground projection of the centroid; the 3D and 2D ranges
    close the right triangle with the height difference."""
    sk, track = walk_track
    assert np.array_equal(track.rho, track.positions[:, :, [0, 2]])
    dy = track.positions[:, :, 1] - track.radar_pos[1]
    closed = np.sqrt(track.rho_dist ** 2 + dy ** 2)
    assert np.max(np.abs(closed - track.r) / track.r) < 1e-9


def test_sample_tracks_rejects_short_clip():
    sk, clip = generate_walk("walk", duration=1.0)
    with pytest.raises(MotionError):
        sample_tracks(sk, clip)


def test_sample_tracks_bounds_check():
    sk, clip = generate_walk("walk")
    placed = place_and_orient(clip, (0.0, 3.0), 0.0)
    with pytest.raises(MotionError):
        sample_tracks(sk, placed, bounds=((-0.5, 0.5), (0.0, 6.5)))


def test_stationary_track_constant_geometry():
    params = GaitParams(speed=0.0, hip_swing_deg=0.0, knee_flex_deg=0.0,
                        arm_swing_deg=0.0, elbow_flex_deg=0.0,
                        bob_amplitude=0.0)
    sk, clip = generate_walk("walk", params=params)
    placed = place_and_orient(clip, (0.0, 3.0), 0.0)
    track = sample_tracks(sk, placed)
    assert np.allclose(track.r, track.r[0], atol=1e-9)
    assert np.allclose(track.amplitude, track.amplitude[0], atol=1e-9)


def test_write_tracks_csv(tmp_path, walk_track):
    sk, track = walk_track
    path = tmp_path / "tracks.csv"
    write_tracks_csv(track.subset([0, 1]), path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("t,bone_id")
    assert len(lines) == 1 + 765 * 2
