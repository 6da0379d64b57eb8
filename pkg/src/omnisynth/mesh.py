"""Spherical triangle meshes from ERP depth maps, with discontinuity culling.

A UV-sphere (default twice the image resolution in each direction) is built in
the camera frame; each vertex sits at the bilinearly sampled depth along its
pixel direction.  Triangles whose vertices straddle a depth step larger than
`k` are culled so occluding edges produce holes rather than stretched
geometry.  Top/bottom vertex rows collapse to single pole vertices, and the
longitude seam carries a duplicated vertex column so no triangle indexes
across the wrap.
"""

from dataclasses import dataclass

import numpy as np

from .sampling import _corners, sample_bilinear, sample_depth_bilinear


@dataclass
class MeshConfig:
    k: float = 1.0                    # discontinuity threshold, meters
    height_segments: int = None       # default 2H
    width_segments: int = None        # default 2W
    relative: bool = False            # cull on |dd| > k_rel * min(depth) instead
    k_rel: float = 0.1

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        for s in (self.height_segments, self.width_segments):
            if s is not None and s < 4:
                raise ValueError("segment counts must be >= 4")


@dataclass
class GradientMaps:
    d_theta: np.ndarray   # (H, W) meters per pixel step, wrapping horizontally
    d_phi: np.ndarray     # (H, W) meters per pixel step, one-sided at top/bottom
    valid: np.ndarray     # (H, W) bool; False where a hole touched the stencil


@dataclass
class SphericalMesh:
    vertices: np.ndarray     # (V, 3) camera-frame positions
    colors: np.ndarray       # (V, 3)
    vertex_depths: np.ndarray  # (V,) sampled radii; < 0 marks invalid
    triangles: np.ndarray    # (T, 3) int32
    alive: np.ndarray        # (T,) bool after culling

    @property
    def n_alive(self):
        return int(np.count_nonzero(self.alive))


def depth_gradients(d):
    """Central differences of a depth map along theta (wrapping) and phi."""
    d = np.asarray(d, dtype=np.float64)
    hole = d < 0
    left = np.roll(d, 1, axis=1)
    right = np.roll(d, -1, axis=1)
    d_theta = (right - left) / 2.0
    up = np.empty_like(d)
    up[1:] = d[:-1]
    up[0] = d[0]
    down = np.empty_like(d)
    down[:-1] = d[1:]
    down[-1] = d[-1]
    d_phi = (down - up) / 2.0
    d_phi[0] = d[1] - d[0]        # one-sided at the poles
    d_phi[-1] = d[-1] - d[-2]
    valid = ~(hole | np.roll(hole, 1, axis=1) | np.roll(hole, -1, axis=1))
    vhole = np.zeros_like(hole)
    vhole[1:] |= hole[:-1]
    vhole[:-1] |= hole[1:]
    valid &= ~vhole
    return GradientMaps(d_theta, d_phi, valid)


def _vertex_samples(img, d, hs, ws, cfg):
    """Sample depth/color at all grid vertices.

    Where the four contributing texels straddle a discontinuity (spread above
    the culling threshold), bilinear interpolation would place the vertex
    between surfaces; those vertices snap to the highest-weight texel instead.
    """
    h, w = d.shape
    # interior rows i = 1..hs-1, columns j = 0..ws (seam duplicated)
    i = np.arange(1, hs)
    j = np.arange(0, ws + 1)
    jj, ii = np.meshgrid(j, i)
    x = jj / ws * w          # theta_j = j/ws*2pi - pi  ->  image x
    y = ii / hs * h          # phi_i = i/hs*pi          ->  image y
    depth, valid = sample_depth_bilinear(d, x, y)
    color = sample_bilinear(img, x, y)

    x0, x1, y0, y1, fx, fy = _corners(x, y, w, h)
    cd = np.stack([d[y0, x0], d[y0, x1], d[y1, x0], d[y1, x1]], axis=-1)
    spread = cd.max(axis=-1) - cd.min(axis=-1)
    if cfg.relative:
        thresh = cfg.k_rel * np.maximum(np.abs(cd).min(axis=-1), 1e-9)
    else:
        thresh = cfg.k
    wts = np.stack([(1 - fx) * (1 - fy), fx * (1 - fy),
                    (1 - fx) * fy, fx * fy], axis=-1)
    nearest = np.argmax(wts, axis=-1)
    snap = spread > thresh
    snap_d = np.take_along_axis(cd, nearest[..., None], axis=-1)[..., 0]
    cc = np.stack([img[y0, x0], img[y0, x1], img[y1, x0], img[y1, x1]], axis=-2)
    snap_c = np.take_along_axis(cc, nearest[..., None, None], axis=-2)[..., 0, :]
    depth = np.where(snap, snap_d, depth)
    color = np.where(snap[..., None], snap_c, color)
    valid = np.where(snap, snap_d >= 0, valid)

    depth = np.where(valid, depth, -1.0)
    return x, y, depth, color


def _pole_sample(img, d, row):
    """Average color/depth of one pixel row for a collapsed pole vertex."""
    valid = d[row] >= 0
    if np.any(valid):
        return float(np.mean(d[row][valid])), np.mean(img[row][valid], axis=0)
    return -1.0, np.zeros(3)


def build_mesh(img, d, cfg=MeshConfig()):
    """Build a discontinuity-culled spherical mesh from an ERP RGBD pair."""
    img = np.asarray(img, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if img.shape[:2] != d.shape:
        raise ValueError("image and depth dimensions differ")
    if not np.any(d >= 0):
        raise ValueError("depth map is entirely holes; cannot build a mesh")
    h, w = d.shape
    hs = cfg.height_segments or 2 * h
    ws = cfg.width_segments or 2 * w

    _, _, vdepth, vcolor = _vertex_samples(img, d, hs, ws, cfg)
    d_top, c_top = _pole_sample(img, d, 0)
    d_bot, c_bot = _pole_sample(img, d, h - 1)

    n_interior = (hs - 1) * (ws + 1)
    depths = np.concatenate([[d_top, d_bot], vdepth.ravel()])
    colors = np.concatenate([[c_top, c_bot], vcolor.reshape(-1, 3)])

    # vertex directions
    i = np.arange(1, hs)
    j = np.arange(0, ws + 1)
    jj, ii = np.meshgrid(j, i)
    theta = jj / ws * 2.0 * np.pi - np.pi
    phi = ii / hs * np.pi
    sp = np.sin(phi)
    dirs = np.stack([sp * np.cos(theta), np.cos(phi), sp * np.sin(theta)], axis=-1)
    dirs = np.concatenate([[[0.0, 1.0, 0.0], [0.0, -1.0, 0.0]], dirs.reshape(-1, 3)])
    # invalid vertices sit at unit radius; they only occur in culled triangles
    vertices = dirs * np.where(depths > 0.0, depths, 1.0)[:, None]

    def vid(i, j):
        return 2 + (i - 1) * (ws + 1) + j

    tris = []
    j = np.arange(ws)
    # top fan
    tris.append(np.stack([np.zeros(ws, dtype=np.int64), vid(1, j), vid(1, j + 1)], axis=1))
    # interior quads
    for i_row in range(1, hs - 1):
        a = vid(i_row, j)
        b = vid(i_row, j + 1)
        c = vid(i_row + 1, j)
        dd = vid(i_row + 1, j + 1)
        tris.append(np.stack([a, c, b], axis=1))
        tris.append(np.stack([b, c, dd], axis=1))
    # bottom fan
    tris.append(np.stack([np.ones(ws, dtype=np.int64), vid(hs - 1, j + 1), vid(hs - 1, j)], axis=1))
    triangles = np.concatenate(tris).astype(np.int32)

    td = depths[triangles]  # (T, 3)
    ok = np.all(td >= 0, axis=1)
    if cfg.relative:
        thresh = cfg.k_rel * np.min(np.abs(td), axis=1)
    else:
        thresh = cfg.k
    step = np.maximum.reduce([np.abs(td[:, 0] - td[:, 1]),
                              np.abs(td[:, 1] - td[:, 2]),
                              np.abs(td[:, 2] - td[:, 0])])
    alive = ok & (step <= thresh)
    return SphericalMesh(vertices, colors, depths, triangles, alive)


def save_obj(mesh, path):
    """Debug export: positions + vertex colors, alive faces only."""
    with open(path, "w") as f:
        for v, c in zip(mesh.vertices, mesh.colors):
            f.write(f"v {v[0]:.6f} {v[1]:.6f} {v[2]:.6f} "
                    f"{c[0]:.4f} {c[1]:.4f} {c[2]:.4f}\n")
        for tri in mesh.triangles[mesh.alive]:
            f.write(f"f {tri[0] + 1} {tri[1] + 1} {tri[2] + 1}\n")
