"""Depth-accuracy and view-synthesis metrics for ERP panoramas.

Depth errors follow the inverse-depth / Euclidean conventions (IMAE, IRMSE,
MAE, RMSE) plus delta-threshold accuracies; image quality uses WS-PSNR with
cosine-latitude row weights.  All reductions are plain np.sum over row-major
arrays so results are bit-stable across runs.
"""

import json
from dataclasses import dataclass

import numpy as np

from .fusion import synthesize_sequence
from .sweep import estimate_depth_pair

DELTA_THRESHOLDS = (1.05, 1.10, 1.25, 1.25 ** 2, 1.25 ** 3)
WSPSNR_CAP_DB = 99.0


@dataclass
class ValidRange:
    d_lo: float = 1.0
    d_hi: float = 50.0

    def __post_init__(self):
        if not 0 < self.d_lo < self.d_hi:
            raise ValueError("need 0 < d_lo < d_hi")


@dataclass
class DepthMetrics:
    imae: float
    irmse: float
    mae: float
    rmse: float
    delta_105: float
    delta_110: float
    delta_125: float
    delta_125_2: float
    delta_125_3: float
    n_valid: int

    def to_dict(self):
        return {
            "imae": self.imae, "irmse": self.irmse,
            "mae": self.mae, "rmse": self.rmse,
            "delta_105": self.delta_105, "delta_110": self.delta_110,
            "delta_125": self.delta_125, "delta_125_2": self.delta_125_2,
            "delta_125_3": self.delta_125_3, "n_valid": self.n_valid,
        }


def depth_metrics(pred, gt, valid_range=ValidRange(), extra_mask=None):
    """Errors of `pred` against `gt` over gt-in-range, pred-positive pixels."""
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ValueError("depth map dimensions differ")
    valid = (gt >= valid_range.d_lo) & (gt <= valid_range.d_hi) & (pred > 0)
    if extra_mask is not None:
        valid &= extra_mask
    n = int(np.count_nonzero(valid))
    if n == 0:
        raise ValueError("no valid pixels for depth metrics")
    p = pred[valid]
    g = gt[valid]
    inv_err = 1.0 / g - 1.0 / p
    err = g - p
    ratio = np.maximum(p / g, g / p)
    deltas = [float(np.sum(ratio < t) / n) for t in DELTA_THRESHOLDS]
    return DepthMetrics(
        imae=float(np.sum(np.abs(inv_err)) / n),
        irmse=float(np.sqrt(np.sum(inv_err * inv_err) / n)),
        mae=float(np.sum(np.abs(err)) / n),
        rmse=float(np.sqrt(np.sum(err * err) / n)),
        delta_105=deltas[0], delta_110=deltas[1], delta_125=deltas[2],
        delta_125_2=deltas[3], delta_125_3=deltas[4], n_valid=n,
    )


def ws_weights(height):
    """Per-row cosine-latitude weights compensating ERP pole oversampling."""
    rows = np.arange(height, dtype=np.float64)
    return np.cos(((rows + 0.5) / height - 0.5) * np.pi)


def ws_psnr(pred, gt, cap=WSPSNR_CAP_DB):
    """Weighted-to-spherically-uniform PSNR in dB for [0, 1] images."""
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape:
        raise ValueError("image dimensions differ")
    h = pred.shape[0]
    w3 = np.broadcast_to(ws_weights(h)[:, None, None], pred.shape)
    se = (pred - gt) ** 2
    wsmse = np.sum(w3 * se) / np.sum(w3)
    if wsmse <= 0.0:
        return cap
    return float(min(10.0 * np.log10(1.0 / wsmse), cap))


def eval_triplet(p0, pose0, p1, pose1, p2, pose2,
                 sweep_cfg=None, mesh_cfg=None, raster_cfg=None, fusion_cfg=None,
                 gt_depth0=None, gt_depth2=None, valid_range=ValidRange(),
                 use_gt_depth=False):
    """Synthesize the middle panorama of a triplet and score it.

    Returns a JSON-serializable report: WS-PSNR of the synthesized middle
    frame against `p1`, plus depth metrics of both source sweeps when ground
    truth depth is supplied.
    """
    report = {}
    est0 = est2 = None
    if gt_depth0 is not None or not use_gt_depth:
        sweep_cfg_eff = sweep_cfg
        if sweep_cfg_eff is None:
            from .sweep import SweepConfig
            sweep_cfg_eff = SweepConfig()
        est0, est2 = estimate_depth_pair(p0, pose0, p2, pose2, sweep_cfg_eff)
        if gt_depth0 is not None:
            report["depth_0"] = depth_metrics(
                est0.depth, gt_depth0, valid_range, extra_mask=est0.consistent).to_dict()
        if gt_depth2 is not None:
            report["depth_2"] = depth_metrics(
                est2.depth, gt_depth2, valid_range, extra_mask=est2.consistent).to_dict()
    if use_gt_depth:
        d0, d2 = gt_depth0, gt_depth2
    else:
        d0 = est0.masked_depth()
        d2 = est2.masked_depth()
    frames, _ = synthesize_sequence(p0, pose0, p2, pose2, 1,
                                    sweep_cfg=sweep_cfg, mesh_cfg=mesh_cfg,
                                    raster_cfg=raster_cfg, fusion_cfg=fusion_cfg,
                                    depth0=d0, depth1=d2)
    report["ws_psnr_middle_db"] = ws_psnr(frames[1], p1)
    report["baseline_m"] = float(np.linalg.norm(pose2.position - pose0.position))
    return report


def report_to_json(report):
    """Stable-key-order JSON for diffable artifacts."""
    return json.dumps(report, indent=2, sort_keys=True)
