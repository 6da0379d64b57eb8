"""Software ERP rasterizer for spherical meshes and point clouds.

Vertices are projected through the pole-safe spherical conversion to
continuous ERP image coordinates and triangles are scanline-filled with
screen-space barycentric interpolation of camera radius and vertex color,
nearest-depth z-buffering.  Triangles spanning the longitude seam are handled
by a second pass with the camera yawed 180 degrees; per pass, triangles whose
projected theta span exceeds `seam_extent_limit` are deferred to the other
pass, and the two passes are depth-composited.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import cart_to_sph_safe, pixel_dirs, transform_point, yaw_matrix, Pose
from .sampling import sample_bilinear  # noqa: F401  (re-exported convenience)

HOLE_DEPTH = -1.0


@dataclass
class RasterConfig:
    width: int = 256
    height: int = 256
    seam_extent_limit: float = np.pi / 2   # triangle theta-span rejection per pass
    splat_radius: float = 0.5              # point-cloud mode, pixels

    def __post_init__(self):
        if not 0 < self.seam_extent_limit <= np.pi:
            raise ValueError("seam_extent_limit must be in (0, pi]")
        if self.width % 2 != 0:
            raise ValueError("ERP width must be even for the 180-degree pass shift")


@dataclass
class RenderOutput:
    color: np.ndarray   # (H, W, 3); black where hole
    depth: np.ndarray   # (H, W); negative = hole

    @property
    def visibility(self):
        return self.depth >= 0


def hole_fraction(out):
    """Fraction of pixels not covered by any fragment."""
    return float(np.count_nonzero(out.depth < 0) / out.depth.size)


@njit(cache=True)
def _raster_tris(xs, ys, rs, cols, h, w, depth_buf, color_buf):
    n = xs.shape[0]
    for t in range(n):
        x0, x1, x2 = xs[t, 0], xs[t, 1], xs[t, 2]
        y0, y1, y2 = ys[t, 0], ys[t, 1], ys[t, 2]
        area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        if area == 0.0:
            continue
        xmin = min(x0, min(x1, x2))
        xmax = max(x0, max(x1, x2))
        ymin = min(y0, min(y1, y2))
        ymax = max(y0, max(y1, y2))
        px0 = max(0, int(np.ceil(xmin - 0.5)))
        px1 = min(w - 1, int(np.floor(xmax - 0.5)))
        py0 = max(0, int(np.ceil(ymin - 0.5)))
        py1 = min(h - 1, int(np.floor(ymax - 0.5)))
        inv_area = 1.0 / area
        for py in range(py0, py1 + 1):
            cy = py + 0.5
            for px in range(px0, px1 + 1):
                cx = px + 0.5
                w0 = ((x1 - cx) * (y2 - cy) - (x2 - cx) * (y1 - cy)) * inv_area
                w1 = ((x2 - cx) * (y0 - cy) - (x0 - cx) * (y2 - cy)) * inv_area
                w2 = 1.0 - w0 - w1
                if w0 < 0.0 or w1 < 0.0 or w2 < 0.0:
                    continue
                z = w0 * rs[t, 0] + w1 * rs[t, 1] + w2 * rs[t, 2]
                if z < depth_buf[py, px]:
                    depth_buf[py, px] = z
                    color_buf[py, px, 0] = (w0 * cols[t, 0, 0] + w1 * cols[t, 1, 0]
                                            + w2 * cols[t, 2, 0])
                    color_buf[py, px, 1] = (w0 * cols[t, 0, 1] + w1 * cols[t, 1, 1]
                                            + w2 * cols[t, 2, 1])
                    color_buf[py, px, 2] = (w0 * cols[t, 0, 2] + w1 * cols[t, 1, 2]
                                            + w2 * cols[t, 2, 2])


@njit(cache=True)
def _splat_points(xs, ys, rs, cols, radius, h, w, depth_buf, color_buf):
    n = xs.shape[0]
    rad = int(np.ceil(radius))
    r2 = radius * radius
    for i in range(n):
        px = int(np.floor(xs[i]))
        py = int(np.floor(ys[i]))
        for dy in range(-rad, rad + 1):
            qy = py + dy
            if qy < 0 or qy >= h:
                continue
            for dx in range(-rad, rad + 1):
                if dx * dx + dy * dy > r2:
                    continue
                qx = (px + dx) % w
                if rs[i] < depth_buf[qy, qx]:
                    depth_buf[qy, qx] = rs[i]
                    color_buf[qy, qx, 0] = cols[i, 0]
                    color_buf[qy, qx, 1] = cols[i, 1]
                    color_buf[qy, qx, 2] = cols[i, 2]


def _project(pts_cam, width, height):
    """Camera-frame points -> continuous ERP coords + radius (pole-safe).

    A point coinciding with the camera has no projection; it is nudged onto
    a tiny forward offset (its triangles are discarded by the r > eps guard).
    """
    pts_cam = np.asarray(pts_cam, dtype=np.float64)
    degenerate = np.linalg.norm(pts_cam, axis=-1) == 0.0
    if np.any(degenerate):
        pts_cam = pts_cam.copy()
        pts_cam[degenerate] = (1e-12, 0.0, 0.0)
    theta, phi, r = cart_to_sph_safe(pts_cam)
    x = (theta + np.pi) / (2.0 * np.pi) * width
    y = phi / np.pi * height
    return x, y, r


def _one_pass(mesh, mesh_pose, cam_pose, cfg):
    pts_cam = cam_pose.world_to_cam(mesh_pose.cam_to_world(mesh.vertices))
    x, y, r = _project(pts_cam, cfg.width, cfg.height)
    tx = x[mesh.triangles]
    ty = y[mesh.triangles]
    tr = r[mesh.triangles]
    span = tx.max(axis=1) - tx.min(axis=1)
    limit_px = cfg.seam_extent_limit / (2.0 * np.pi) * cfg.width
    keep = mesh.alive & (span <= limit_px) & np.all(tr > 1e-9, axis=1)
    depth_buf = np.full((cfg.height, cfg.width), np.inf)
    color_buf = np.zeros((cfg.height, cfg.width, 3))
    _raster_tris(np.ascontiguousarray(tx[keep]), np.ascontiguousarray(ty[keep]),
                 np.ascontiguousarray(tr[keep]),
                 np.ascontiguousarray(mesh.colors[mesh.triangles[keep]]),
                 cfg.height, cfg.width, depth_buf, color_buf)
    return depth_buf, color_buf


def render_mesh(mesh, mesh_pose, target_pose, cfg=RasterConfig()):
    """Render a spherical mesh from a novel pose into a 360-degree RGBD image."""
    if mesh.n_alive == 0:
        raise ValueError("mesh has no alive triangles")
    d1, c1 = _one_pass(mesh, mesh_pose, target_pose, cfg)
    yawed = Pose(target_pose.position, target_pose.rotation @ yaw_matrix(np.pi))
    d2, c2 = _one_pass(mesh, mesh_pose, yawed, cfg)
    # the yawed camera sees theta shifted by pi: shift its image back by W/2
    d2 = np.roll(d2, cfg.width // 2, axis=1)
    c2 = np.roll(c2, cfg.width // 2, axis=1)
    take2 = d2 < d1
    depth = np.where(take2, d2, d1)
    color = np.where(take2[..., None], c2, c1)
    hole = ~np.isfinite(depth)
    depth = np.where(hole, HOLE_DEPTH, depth)
    color = np.where(hole[..., None], 0.0, color)
    return RenderOutput(color, depth)


def render_points(img, d, src_pose, target_pose, cfg=RasterConfig()):
    """Splat each valid RGBD pixel as a disc; the sparsity-ablation renderer."""
    img = np.asarray(img, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if img.shape[:2] != d.shape:
        raise ValueError("image and depth dimensions differ")
    h, w = d.shape
    valid = d >= 0
    dirs = pixel_dirs(w, h)
    pts = dirs[valid] * d[valid][:, None]
    pts_cam = transform_point(src_pose, target_pose, pts)
    x, y, r = _project(pts_cam, cfg.width, cfg.height)
    depth_buf = np.full((cfg.height, cfg.width), np.inf)
    color_buf = np.zeros((cfg.height, cfg.width, 3))
    _splat_points(x, y, r, np.ascontiguousarray(img[valid]),
                  cfg.splat_radius, cfg.height, cfg.width, depth_buf, color_buf)
    hole = ~np.isfinite(depth_buf)
    depth = np.where(hole, HOLE_DEPTH, depth_buf)
    color = np.where(hole[..., None], 0.0, color_buf)
    return RenderOutput(color, depth)
