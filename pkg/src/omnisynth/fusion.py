"""Visibility-driven fusion of two rendered RGBD panoramas plus hole filling.

Where both renders agree in depth the colors are alpha-blended with symmetric
near-favoring weights; where they disagree the nearer surface wins
(anti-ghosting); pixels visible in neither are filled by Laplace diffusion
with horizontal wrap at the longitude seam.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import interpolate_pose
from .mesh import MeshConfig, build_mesh
from .raster import RasterConfig, RenderOutput, render_mesh
from .sweep import SweepConfig, estimate_depth_pair


@dataclass
class FusionConfig:
    depth_agreement_eps: float = 0.05   # relative gap below which colors blend
    inpaint_iters: int = 2000
    inpaint_tol: float = 1e-4

    def __post_init__(self):
        if self.depth_agreement_eps < 0:
            raise ValueError("depth_agreement_eps must be >= 0")
        if self.inpaint_iters < 1:
            raise ValueError("inpaint_iters must be >= 1")


def fuse(r0, r1, cfg=FusionConfig()):
    """Fuse two renders into one RGBD panorama; residual holes stay negative."""
    if r0.depth.shape != r1.depth.shape:
        raise ValueError("render dimensions differ")
    v0 = r0.depth >= 0
    v1 = r1.depth >= 0
    both = v0 & v1
    d0 = np.where(v0, r0.depth, np.inf)
    d1 = np.where(v1, r1.depth, np.inf)
    near0 = d0 <= d1

    gap = np.abs(r0.depth - r1.depth) / np.maximum(np.minimum(d0, d1), 1e-9)
    blend = both & (gap <= cfg.depth_agreement_eps)

    w0 = 1.0 / (1.0 + np.maximum(r0.depth, 0.0))
    w1 = 1.0 / (1.0 + np.maximum(r1.depth, 0.0))
    wsum = w0 + w1
    blend_color = (w0[..., None] * r0.color + w1[..., None] * r1.color) / wsum[..., None]
    blend_depth = (w0 * r0.depth + w1 * r1.depth) / wsum

    color = np.where(near0[..., None], r0.color, r1.color)
    depth = np.where(near0, r0.depth, r1.depth)
    color = np.where(blend[..., None], blend_color, color)
    depth = np.where(blend, blend_depth, depth)

    one = v0 ^ v1
    color = np.where(one[..., None], np.where(v0[..., None], r0.color, r1.color), color)
    depth = np.where(one, np.where(v0, r0.depth, r1.depth), depth)

    hole = ~(v0 | v1)
    color = np.where(hole[..., None], 0.0, color)
    depth = np.where(hole, -1.0, depth)
    return RenderOutput(color, depth)


def _shift_up(a):
    out = np.empty_like(a)
    out[1:] = a[:-1]
    out[0] = a[0]
    return out


def _shift_down(a):
    out = np.empty_like(a)
    out[:-1] = a[1:]
    out[-1] = a[-1]
    return out


def inpaint(img, holes, cfg=FusionConfig()):
    """Fill `holes` (bool, True = fill) by Jacobi Laplace diffusion.

    Horizontal neighbors wrap at the seam; vertical neighbors clamp at the
    poles.  Hole pixels are seeded with the mean of the hole-boundary pixels
    so every value stays within the boundary range (discrete maximum
    principle).
    """
    img = np.asarray(img, dtype=np.float64)
    holes = np.asarray(holes, dtype=bool)
    if holes.all():
        raise ValueError("cannot inpaint an image that is entirely holes")
    if not holes.any():
        return img.copy()
    neighbor_of_hole = (np.roll(holes, 1, axis=1) | np.roll(holes, -1, axis=1)
                        | _shift_up(holes) | _shift_down(holes))
    boundary = neighbor_of_hole & ~holes
    out = img.copy()
    if boundary.any():
        out[holes] = np.mean(img[boundary], axis=0)
    hol3 = holes[..., None] if img.ndim == 3 else holes
    for _ in range(cfg.inpaint_iters):
        avg = (np.roll(out, 1, axis=1) + np.roll(out, -1, axis=1)
               + _shift_up(out) + _shift_down(out)) / 4.0
        new = np.where(hol3, avg, out)
        delta = np.max(np.abs(new - out)) if holes.any() else 0.0
        out = new
        if delta < cfg.inpaint_tol:
            break
    return out


def synthesize_sequence(pano0, pose0, pano1, pose1, n_frames,
                        sweep_cfg=None, mesh_cfg=None, raster_cfg=None,
                        fusion_cfg=None, depth0=None, depth1=None):
    """Synthesize intermediate panoramas between two posed inputs.

    Runs the depth sweep once (unless depth maps are supplied, e.g. ground
    truth), builds both meshes once, then renders/fuses/inpaints one frame per
    pose interpolated at t = 0, 1/(n+1), ..., 1.  Returns (frames, poses);
    the endpoint frames are rendered, not copied.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    pano0 = np.asarray(pano0, dtype=np.float64)
    pano1 = np.asarray(pano1, dtype=np.float64)
    h, w = pano0.shape[:2]
    sweep_cfg = sweep_cfg or SweepConfig()
    mesh_cfg = mesh_cfg or MeshConfig()
    raster_cfg = raster_cfg or RasterConfig(width=w, height=h)
    fusion_cfg = fusion_cfg or FusionConfig()

    if depth0 is None or depth1 is None:
        est0, est1 = estimate_depth_pair(pano0, pose0, pano1, pose1, sweep_cfg)
        depth0 = est0.masked_depth() if depth0 is None else depth0
        depth1 = est1.masked_depth() if depth1 is None else depth1

    mesh0 = build_mesh(pano0, depth0, mesh_cfg)
    mesh1 = build_mesh(pano1, depth1, mesh_cfg)

    ts = np.linspace(0.0, 1.0, n_frames + 2)
    frames, poses = [], []
    for t in ts:
        pose = interpolate_pose(pose0, pose1, t)
        r0 = render_mesh(mesh0, pose0, pose, raster_cfg)
        r1 = render_mesh(mesh1, pose1, pose, raster_cfg)
        fused = fuse(r0, r1, fusion_cfg)
        holes = fused.depth < 0
        color = inpaint(fused.color, holes, fusion_cfg) if holes.any() else fused.color
        frames.append(color)
        poses.append(pose)
    return frames, poses
