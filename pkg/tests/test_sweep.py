import numpy as np
import pytest

import omnisynth as om
from omnisynth.sweep import (CostVolume, DegenerateBaselineError, MASKED_COST,
                             SweepConfig, build_cost_volume, extract_depth)


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig(n_levels=1)
    with pytest.raises(ValueError):
        SweepConfig(d_min=5.0, d_max=2.0)
    with pytest.raises(ValueError):
        SweepConfig(window=4)


def test_level_parameterization_monotone():
    cfg = SweepConfig(n_levels=16)
    inv = cfg.inverse_depths()
    assert np.all(np.diff(inv) > 0)
    depths = 1.0 / inv
    assert np.all(np.diff(depths) < 0)  # level -> depth strictly decreasing
    assert depths[0] == pytest.approx(cfg.d_max)
    assert depths[-1] == pytest.approx(cfg.d_min)


def test_zero_baseline_rejected():
    img = np.zeros((8, 16, 3))
    pose = om.Pose([0.0, 0.0, 0.0])
    with pytest.raises(DegenerateBaselineError):
        build_cost_volume(img, pose, img, pose, SweepConfig())


def test_constant_color_ambiguous():
    img = np.full((16, 32, 3), 0.5)
    cv = build_cost_volume(img, om.Pose([0, 0, 0]), img, om.Pose([1, 0, 0]),
                           SweepConfig(n_levels=8))
    est = extract_depth(cv, SweepConfig(n_levels=8))
    # every level matches equally well -> zero confidence everywhere
    assert np.all(est.confidence == 0.0)


def test_extract_argmin_exact():
    cfg = SweepConfig(n_levels=8, subpixel=False)
    inv = cfg.inverse_depths()
    costs = np.ones((2, 2, 8))
    costs[:, :, 5] = 0.0
    cv = CostVolume(costs, np.ones_like(costs, dtype=bool), inv)
    est = extract_depth(cv, cfg)
    assert np.allclose(est.depth, 1.0 / inv[5])


def test_extract_symmetric_parabola_keeps_center():
    cfg = SweepConfig(n_levels=8, subpixel=True)
    inv = cfg.inverse_depths()
    costs = np.ones((1, 1, 8))
    costs[0, 0, 3:6] = [1.0, 0.5, 1.0]
    cv = CostVolume(costs, np.ones_like(costs, dtype=bool), inv)
    est = extract_depth(cv, cfg)
    assert est.depth[0, 0] == pytest.approx(1.0 / inv[4])


def test_extract_asymmetric_parabola_shifts():
    cfg = SweepConfig(n_levels=8, subpixel=True)
    inv = cfg.inverse_depths()
    costs = np.ones((1, 1, 8))
    costs[0, 0, 3:6] = [0.6, 0.5, 1.0]  # true minimum left of the center level
    cv = CostVolume(costs, np.ones_like(costs, dtype=bool), inv)
    est = extract_depth(cv, cfg)
    step = inv[1] - inv[0]
    offset = (0.6 - 1.0) / (2.0 * (0.6 - 2 * 0.5 + 1.0))
    assert est.depth[0, 0] == pytest.approx(1.0 / (inv[4] + offset * step))


def test_depth_always_in_range(street_sweep):
    cfg = SweepConfig()
    for est in street_sweep:
        assert np.all(est.depth >= cfg.d_min)
        assert np.all(est.depth <= cfg.d_max)


def test_cost_volume_gt_level_wins(street_frames):
    # at the true depth's sweep level, the aggregated cost should be the
    # minimum for most textured co-visible pixels
    img0, d0, pose0 = street_frames[0.0]
    img1, d1, pose1 = street_frames[1.0]
    cfg = SweepConfig()
    cv = build_cost_volume(img0, pose0, img1, pose1, cfg)
    inv = cfg.inverse_depths()
    gt_inv = np.clip(1.0 / np.clip(d0, cfg.d_min, cfg.d_max),
                     inv[0], inv[-1])
    gt_level = np.round((gt_inv - inv[0]) / (inv[1] - inv[0])).astype(int)
    best = np.argmin(cv.costs, axis=-1)
    sel = (d0 > cfg.d_min) & (d0 < cfg.d_max)
    sel[:32] = sel[-32:] = False  # skip pole rows
    close = np.abs(best - gt_level)[sel] <= 1
    assert np.mean(close) > 0.80


def test_brightness_scaling_invariance(street_frames):
    img0, _, pose0 = street_frames[0.0]
    img1, _, pose1 = street_frames[1.0]
    cfg = SweepConfig(n_levels=16)
    a = build_cost_volume(img0[::4, ::4], pose0, img1[::4, ::4], pose1, cfg)
    b = build_cost_volume(0.5 * img0[::4, ::4], pose0, 0.5 * img1[::4, ::4],
                          pose1, cfg)
    assert np.array_equal(np.argmin(a.costs, axis=-1), np.argmin(b.costs, axis=-1))


def test_estimate_pair_swap_symmetry(street_frames):
    img0, _, pose0 = street_frames[0.0]
    img1, _, pose1 = street_frames[1.0]
    cfg = SweepConfig(n_levels=16, window=3)
    small0, small1 = img0[::4, ::4], img1[::4, ::4]
    a0, a1 = om.estimate_depth_pair(small0, pose0, small1, pose1, cfg)
    b1, b0 = om.estimate_depth_pair(small1, pose1, small0, pose0, cfg)
    assert np.array_equal(a0.depth, b0.depth)
    assert np.array_equal(a1.depth, b1.depth)


def test_lr_consistency_on_ground(street_frames, street_sweep):
    # co-visible ground-plane pixels should pass the left-right check
    _, d0, _ = street_frames[0.0]
    est0, _ = street_sweep
    ground = (d0 > 2.0) & (d0 < 10.0)
    ground[:128] = False  # lower hemisphere only
    ground[200:] = False  # skip extreme nadir distortion
    assert np.mean(est0.consistent[ground]) > 0.85


def test_occlusion_fails_lr(street_frames, street_sweep):
    # pixels of view 0 that view 1 cannot see should mostly be flagged
    img0, d0, pose0 = street_frames[0.0]
    img1, d1, pose1 = street_frames[1.0]
    est0, _ = street_sweep
    h, w = d0.shape
    dirs = om.pixel_dirs(w, h)
    pts1 = om.transform_point(pose0, pose1, dirs * d0[..., None])
    r_pred = np.linalg.norm(pts1, axis=-1)
    x, y = om.dir_to_erp_pixel(pts1, w, h)
    xi = np.round(x).astype(int) % w
    yi = np.clip(np.round(y).astype(int), 0, h - 1)
    occluded = (d1[yi, xi] < r_pred * 0.9) & (d0 < 100)
    if occluded.sum() > 50:
        assert np.mean(est0.consistent[occluded]) < 0.5


def test_aggregation_improves_imae(street_frames):
    img0, d0, pose0 = street_frames[0.0]
    img1, _, pose1 = street_frames[1.0]
    res = {}
    for win in (1, 5):
        cfg = SweepConfig(window=win)
        est, _ = om.estimate_depth_pair(img0, pose0, img1, pose1, cfg)
        dm = om.depth_metrics(est.depth, d0, om.ValidRange(),
                              extra_mask=est.consistent)
        res[win] = dm.imae
    assert res[5] < res[1]
