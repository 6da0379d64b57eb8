"""Classical spherical-sweep stereo for ERP panorama pairs.

Depth hypotheses are spaced uniformly in inverse depth (the omnidirectional
analog of disparity).  Matching cost is mean absolute RGB difference with box
aggregation; depth is extracted winner-take-all with optional sub-level
parabola refinement.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import uniform_filter

from .geometry import dir_to_erp_xy, pixel_dirs, transform_point
from .sampling import sample_bilinear

MASKED_COST = 1.0e9


class DegenerateBaselineError(ValueError):
    pass


@dataclass
class SweepConfig:
    n_levels: int = 64
    d_min: float = 1.0
    d_max: float = 50.0
    window: int = 5
    subpixel: bool = True
    lr_consistency: bool = True
    lr_tol: float = 0.05  # relative depth disagreement marking low confidence

    def __post_init__(self):
        if self.n_levels < 2:
            raise ValueError("need at least 2 sweep levels")
        if not 0 < self.d_min < self.d_max:
            raise ValueError("need 0 < d_min < d_max")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError("window must be odd and >= 1")

    def inverse_depths(self):
        """Level k <-> inverse depth, increasing with k (depth decreasing)."""
        return np.linspace(1.0 / self.d_max, 1.0 / self.d_min, self.n_levels)


@dataclass
class CostVolume:
    costs: np.ndarray           # (H, W, N), masked entries hold MASKED_COST
    valid: np.ndarray           # (H, W, N) bool
    inv_depths: np.ndarray      # (N,)


@dataclass
class DepthEstimate:
    depth: np.ndarray           # (H, W) meters in [d_min, d_max]
    confidence: np.ndarray      # (H, W) in [0, 1]
    consistent: np.ndarray = None  # (H, W) bool after LR check (None if not run)

    def masked_depth(self, min_confidence=0.0):
        """Depth with low-confidence / LR-inconsistent pixels as holes (-1)."""
        bad = self.confidence < min_confidence
        if self.consistent is not None:
            bad |= ~self.consistent
        return np.where(bad, -1.0, self.depth)


def _check_baseline(pose_a, pose_b):
    if np.linalg.norm(pose_a.position - pose_b.position) <= 1e-9:
        raise DegenerateBaselineError("camera positions coincide; sweep is degenerate")


def build_cost_volume(ref, ref_pose, other, other_pose, cfg):
    """Photometric spherical-sweep cost volume for the `ref` panorama."""
    ref = np.asarray(ref, dtype=np.float64)
    other = np.asarray(other, dtype=np.float64)
    if ref.shape != other.shape:
        raise ValueError("panoramas must share dimensions")
    _check_baseline(ref_pose, other_pose)
    h, w = ref.shape[:2]
    dirs = pixel_dirs(w, h)
    inv_d = cfg.inverse_depths()
    costs = np.empty((h, w, cfg.n_levels))
    valid = np.empty((h, w, cfg.n_levels), dtype=bool)
    for k, q in enumerate(inv_d):
        pts = dirs / q  # hypothesis sphere of radius 1/q in the ref frame
        pts_other = transform_point(ref_pose, other_pose, pts)
        x, y = dir_to_erp_xy(pts_other, w, h)
        ok = (y >= 0.5) & (y <= h - 0.5)  # within half a pixel of a pole row
        samp = sample_bilinear(other, x, y)
        raw = np.mean(np.abs(samp - ref), axis=-1)
        agg = _aggregate(raw, ok, cfg.window)
        costs[:, :, k] = np.where(ok, agg, MASKED_COST)
        valid[:, :, k] = ok
    return CostVolume(costs, valid, inv_d)


def _aggregate(raw, ok, window):
    if window == 1:
        return raw
    okf = ok.astype(np.float64)
    num = uniform_filter(raw * okf, size=window, mode=("nearest", "wrap"))
    den = uniform_filter(okf, size=window, mode=("nearest", "wrap"))
    with np.errstate(invalid="ignore"):
        return np.where(den > 0, num / np.maximum(den, 1e-12), raw)


def extract_depth(cv, cfg):
    """Winner-take-all depth with parabola sub-level refinement and confidence."""
    h, w, n = cv.costs.shape
    best = np.argmin(cv.costs, axis=-1)
    step = cv.inv_depths[1] - cv.inv_depths[0]
    inv = cv.inv_depths[best]
    if cfg.subpixel:
        inner = np.clip(best, 1, n - 2)
        rows, cols = np.indices((h, w))
        cl = cv.costs[rows, cols, inner - 1]
        cm = cv.costs[rows, cols, inner]
        cr = cv.costs[rows, cols, inner + 1]
        denom = cl - 2.0 * cm + cr
        usable = ((best == inner) & (denom > 1e-12)
                  & (cl < MASKED_COST) & (cr < MASKED_COST))
        offset = np.where(usable, np.clip((cl - cr) / (2.0 * np.maximum(denom, 1e-12)),
                                          -0.5, 0.5), 0.0)
        inv = inv + offset * step
    depth = np.clip(1.0 / np.clip(inv, 1.0 / cfg.d_max, 1.0 / cfg.d_min),
                    cfg.d_min, cfg.d_max)
    any_valid = np.any(cv.valid, axis=-1)
    masked = np.where(cv.valid, cv.costs, np.nan)
    with np.errstate(invalid="ignore"):
        cmin = np.nanmin(masked, axis=-1)
        cmean = np.nanmean(masked, axis=-1)
        conf = np.where(any_valid & (cmean > 1e-12),
                        np.clip(1.0 - cmin / np.maximum(cmean, 1e-12), 0.0, 1.0), 0.0)
    return DepthEstimate(depth, conf)


def _lr_consistency(est_a, pose_a, est_b, pose_b, tol):
    """Mark pixels of `a` whose depth reprojects consistently into `b`."""
    h, w = est_a.depth.shape
    dirs = pixel_dirs(w, h)
    pts_b = transform_point(pose_a, pose_b, dirs * est_a.depth[..., None])
    r_pred = np.linalg.norm(pts_b, axis=-1)
    x, y = dir_to_erp_xy(pts_b, w, h)
    d_b = sample_bilinear(est_b.depth, x, y)
    return np.abs(r_pred - d_b) <= tol * d_b


def estimate_depth_pair(a, pose_a, b, pose_b, cfg):
    """Sweep both panoramas (roles swapped) with optional left-right checking."""
    est_a = extract_depth(build_cost_volume(a, pose_a, b, pose_b, cfg), cfg)
    est_b = extract_depth(build_cost_volume(b, pose_b, a, pose_a, cfg), cfg)
    if cfg.lr_consistency:
        est_a.consistent = _lr_consistency(est_a, pose_a, est_b, pose_b, cfg.lr_tol)
        est_b.consistent = _lr_consistency(est_b, pose_b, est_a, pose_a, cfg.lr_tol)
        est_a.confidence = np.where(est_a.consistent, est_a.confidence, 0.0)
        est_b.confidence = np.where(est_b.consistent, est_b.confidence, 0.0)
    return est_a, est_b
