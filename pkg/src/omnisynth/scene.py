"""Deterministic analytic test scenes: ground plane + axis-aligned boxes.

Raycasting these scenes yields ground-truth RGBD panoramas and cubemap faces
at arbitrary poses.  All texturing is hash-based value noise so outputs are
bit-identical across runs and carry enough high-frequency detail for
photometric stereo matching.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .cubemap import FACE_AXES, CubemapFaces, face_ray_dirs
from .geometry import Pose, pixel_dirs

SKY_T = np.inf
SKY_DEPTH = 1.0e6  # sentinel written into depth maps for sky pixels
_EPS = 1e-6


def _hash01(ix, iy, iz, seed):
    """Deterministic lattice hash -> floats in [0, 1)."""
    h = (ix.astype(np.uint64) * np.uint64(73856093)
         ^ iy.astype(np.uint64) * np.uint64(19349663)
         ^ iz.astype(np.uint64) * np.uint64(83492791)
         ^ np.uint64(seed) * np.uint64(2654435761))
    h &= np.uint64(0xFFFFFFFF)
    h ^= h >> np.uint64(16)
    h = (h * np.uint64(0x45D9F3B)) & np.uint64(0xFFFFFFFF)
    h ^= h >> np.uint64(16)
    h = (h * np.uint64(0x45D9F3B)) & np.uint64(0xFFFFFFFF)
    h ^= h >> np.uint64(16)
    return h.astype(np.float64) / float(0x100000000)


def value_noise(p, scale, seed):
    """Trilinearly interpolated lattice noise of 3D points (..., 3) in [0, 1)."""
    q = np.asarray(p, dtype=np.float64) / scale
    q0 = np.floor(q)
    f = q - q0
    i = q0.astype(np.int64)
    out = np.zeros(q.shape[:-1])
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                h = _hash01(i[..., 0] + dx, i[..., 1] + dy, i[..., 2] + dz, seed)
                wx = f[..., 0] if dx else 1.0 - f[..., 0]
                wy = f[..., 1] if dy else 1.0 - f[..., 1]
                wz = f[..., 2] if dz else 1.0 - f[..., 2]
                out += h * wx * wy * wz
    return out


@dataclass
class Box:
    lo: np.ndarray
    hi: np.ndarray
    seed: int = 0

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=np.float64)
        self.hi = np.asarray(self.hi, dtype=np.float64)
        if not np.all(self.hi > self.lo):
            raise ValueError("box must have positive extent")

    def contains(self, p, margin=0.0):
        p = np.asarray(p, dtype=np.float64)
        return bool(np.all(p > self.lo - margin) and np.all(p < self.hi + margin))


@dataclass
class Scene:
    ground_height: float = 0.0
    checker_scale: float = 2.0
    ground_color_a: np.ndarray = field(default_factory=lambda: np.array([0.55, 0.52, 0.50]))
    ground_color_b: np.ndarray = field(default_factory=lambda: np.array([0.35, 0.33, 0.32]))
    boxes: list = field(default_factory=list)
    sky_color: np.ndarray = field(default_factory=lambda: np.array([0.65, 0.80, 0.95]))
    seed: int = 0

    def __post_init__(self):
        self.ground_color_a = np.asarray(self.ground_color_a, dtype=np.float64)
        self.ground_color_b = np.asarray(self.ground_color_b, dtype=np.float64)
        self.sky_color = np.asarray(self.sky_color, dtype=np.float64)

    def point_inside_geometry(self, p, margin=0.05):
        p = np.asarray(p, dtype=np.float64)
        if p[1] <= self.ground_height + margin:
            return True
        return any(b.contains(p, margin) for b in self.boxes)


def _intersect_plane(scene, origins, dirs):
    oy, dy = origins[..., 1], dirs[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (scene.ground_height - oy) / dy
    t = np.where((dy != 0.0) & (t > _EPS), t, np.inf)
    return t


def _intersect_box(box, origins, dirs):
    """Slab test; returns (t, face_id) with face_id = axis*2 + (0 lo, 1 hi)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (box.lo - origins) / dirs
        t2 = (box.hi - origins) / dirs
    tmin = np.fmin(t1, t2)
    tmax = np.fmax(t1, t2)
    near = np.max(tmin, axis=-1)
    far = np.min(tmax, axis=-1)
    hit_entry = (near < far) & (near > _EPS)
    hit_exit = (near < far) & (near <= _EPS) & (far > _EPS)  # origin inside
    t = np.where(hit_entry, near, np.where(hit_exit, far, np.inf))
    axis_entry = np.argmax(tmin, axis=-1)
    axis_exit = np.argmin(tmax, axis=-1)
    axis = np.where(hit_entry, axis_entry, axis_exit)
    d_axis = np.take_along_axis(dirs, axis[..., None], axis=-1)[..., 0]
    # entering through the lo face means travelling in +axis direction
    lo_face = np.where(hit_entry, d_axis > 0, d_axis < 0)
    face = axis * 2 + np.where(lo_face, 0, 1)
    return t, face


def _ground_albedo(scene, pts):
    cx = np.floor(pts[..., 0] / scene.checker_scale).astype(np.int64)
    cz = np.floor(pts[..., 2] / scene.checker_scale).astype(np.int64)
    checker = ((cx + cz) & 1).astype(np.float64)[..., None]
    base = (1.0 - checker) * scene.ground_color_a + checker * scene.ground_color_b
    n1 = value_noise(pts, 1.1, scene.seed * 7 + 1)
    n2 = value_noise(pts, 0.45, scene.seed * 7 + 2)
    mod = (0.55 + 0.45 * n1) * (0.80 + 0.20 * n2)
    return np.clip(base * mod[..., None], 0.0, 1.0)


def _box_albedo(scene, box, face, pts):
    fr = _hash01(np.asarray(face, dtype=np.int64) + 11,
                 np.full_like(np.asarray(face, dtype=np.int64), 3),
                 np.full_like(np.asarray(face, dtype=np.int64), 5), box.seed)
    fg = _hash01(np.asarray(face, dtype=np.int64) + 23,
                 np.full_like(np.asarray(face, dtype=np.int64), 7),
                 np.full_like(np.asarray(face, dtype=np.int64), 9), box.seed)
    fb = _hash01(np.asarray(face, dtype=np.int64) + 37,
                 np.full_like(np.asarray(face, dtype=np.int64), 13),
                 np.full_like(np.asarray(face, dtype=np.int64), 17), box.seed)
    base = 0.25 + 0.65 * np.stack([fr, fg, fb], axis=-1)
    n1 = value_noise(pts, 0.9, scene.seed * 7 + 3 + box.seed)
    n2 = value_noise(pts, 0.4, scene.seed * 7 + 4 + box.seed)
    mod = (0.50 + 0.50 * n1) * (0.75 + 0.25 * n2)
    return np.clip(base * mod[..., None], 0.0, 1.0)


def raycast(scene, origins, dirs):
    """Nearest hit of rays (..., 3); returns (t, albedo, valid).

    Misses get t = inf, valid = False, and the sky color as albedo.
    Unit-length `dirs` make t the Euclidean distance.
    """
    origins = np.broadcast_to(np.asarray(origins, dtype=np.float64), dirs.shape)
    dirs = np.asarray(dirs, dtype=np.float64)
    t_best = _intersect_plane(scene, origins, dirs)
    kind = np.where(np.isfinite(t_best), 0, -1)  # -1 sky, 0 ground, 1+i box i
    for i, box in enumerate(scene.boxes):
        t, _ = _intersect_box(box, origins, dirs)
        closer = t < t_best
        t_best = np.where(closer, t, t_best)
        kind = np.where(closer, 1 + i, kind)
    albedo = np.broadcast_to(scene.sky_color, dirs.shape).copy()
    t_safe = np.where(np.isfinite(t_best), t_best, 0.0)
    pts = origins + t_safe[..., None] * dirs
    sel = kind == 0
    if np.any(sel):
        albedo[sel] = _ground_albedo(scene, pts[sel])
    for i, box in enumerate(scene.boxes):
        sel = kind == 1 + i
        if np.any(sel):
            _, face = _intersect_box(box, origins[sel], dirs[sel])
            albedo[sel] = _box_albedo(scene, box, face, pts[sel])
    return t_best, albedo, kind >= 0


def render_erp(scene, pose, width, height):
    """Ground-truth ERP render: returns (rgb (H,W,3), depth (H,W) in meters)."""
    dirs = pixel_dirs(width, height) @ pose.rotation.T
    t, albedo, valid = raycast(scene, pose.position, dirs)
    depth = np.where(valid, t, SKY_DEPTH)
    return albedo, depth


def render_cubemap(scene, pose, face_size):
    """Six 90-degree pinhole faces; depth faces hold perspective z-depth."""
    colors = np.zeros((6, face_size, face_size, 3))
    depths = np.zeros((6, face_size, face_size))
    for i in range(6):
        dirs_cam = face_ray_dirs(i, face_size)
        dirs = dirs_cam @ pose.rotation.T
        t, albedo, valid = raycast(scene, pose.position, dirs)
        t = np.where(valid, t, SKY_DEPTH)
        colors[i] = albedo
        depths[i] = t * (dirs_cam @ FACE_AXES[i, 0])  # z along the face axis
    return CubemapFaces(colors, depths)


def make_sequence(scene, start_pose, heading, baseline_m, count, width=256, height=256):
    """Render `count` RGBD frames spaced exactly `baseline_m` along `heading`."""
    if baseline_m <= 0:
        raise ValueError("baseline must be positive")
    heading = np.asarray(heading, dtype=np.float64)
    norm = np.linalg.norm(heading)
    if norm == 0:
        raise ValueError("heading must be a nonzero vector")
    heading = heading / norm
    frames = []
    for i in range(count):
        pos = start_pose.position + i * baseline_m * heading
        if scene.point_inside_geometry(pos):
            raise ValueError(f"camera pose {i} at {pos} is inside scene geometry")
        pose = Pose(pos, start_pose.rotation)
        img, depth = render_erp(scene, pose, width, height)
        frames.append((img, depth, pose))
    return frames


def street_canyon(seed=0):
    """Two rows of boxes flanking a checkered ground plane."""
    boxes = []
    heights = [6.0, 8.5, 5.0, 9.5, 7.0, 6.5, 8.0, 5.5]
    for i in range(8):
        x0 = -16.0 + i * 9.0
        boxes.append(Box([x0, 0.0, -9.0], [x0 + 7.0, heights[i], -4.0], seed=seed * 100 + i))
        boxes.append(Box([x0 + 2.0, 0.0, 4.0], [x0 + 8.5, heights[7 - i], 9.0],
                         seed=seed * 100 + 50 + i))
    return Scene(boxes=boxes, seed=seed)


def room(seed=0):
    """Four thin walls and a ceiling slab enclosing a 10 x 3 x 8 m interior."""
    w = 0.3
    boxes = [
        Box([-5.0 - w, 0.0, -4.0 - w], [-5.0, 3.0, 4.0 + w], seed=seed * 100 + 1),
        Box([5.0, 0.0, -4.0 - w], [5.0 + w, 3.0, 4.0 + w], seed=seed * 100 + 2),
        Box([-5.0 - w, 0.0, -4.0 - w], [5.0 + w, 3.0, -4.0], seed=seed * 100 + 3),
        Box([-5.0 - w, 0.0, 4.0], [5.0 + w, 3.0, 4.0 + w], seed=seed * 100 + 4),
        Box([-5.0 - w, 3.0, -4.0 - w], [5.0 + w, 3.0 + w, 4.0 + w], seed=seed * 100 + 5),
    ]
    return Scene(boxes=boxes, checker_scale=1.0, seed=seed)


PRESETS = {"street-canyon": street_canyon, "room": room}


def scene_to_json(scene):
    return {
        "ground": {
            "height": scene.ground_height,
            "checker_scale": scene.checker_scale,
            "color_a": scene.ground_color_a.tolist(),
            "color_b": scene.ground_color_b.tolist(),
        },
        "boxes": [{"lo": b.lo.tolist(), "hi": b.hi.tolist(), "seed": b.seed}
                  for b in scene.boxes],
        "sky_color": scene.sky_color.tolist(),
        "seed": scene.seed,
    }


def scene_from_json(obj):
    g = obj.get("ground", {})
    return Scene(
        ground_height=g.get("height", 0.0),
        checker_scale=g.get("checker_scale", 2.0),
        ground_color_a=g.get("color_a", [0.55, 0.52, 0.50]),
        ground_color_b=g.get("color_b", [0.35, 0.33, 0.32]),
        boxes=[Box(b["lo"], b["hi"], b.get("seed", 0)) for b in obj.get("boxes", [])],
        sky_color=obj.get("sky_color", [0.65, 0.80, 0.95]),
        seed=obj.get("seed", 0),
    )


def load_scene(name_or_path):
    """Resolve a preset name or a scene JSON file path."""
    key = str(name_or_path).replace("_", "-")
    if key in PRESETS:
        return PRESETS[key]()
    with open(name_or_path) as f:
        return scene_from_json(json.load(f))
