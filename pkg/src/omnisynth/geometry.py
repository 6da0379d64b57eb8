"""Spherical/Cartesian geometry for equirectangular (ERP) panoramas.

Conventions used throughout the package:
  * +y is the polar axis (phi = 0 at the north pole, phi = pi at the south).
  * theta = atan2(z, x) in [-pi, pi); the camera's forward axis is +x (theta = 0).
  * An ERP image of width W and height H maps continuous image coordinates
    (x, y) to angles via theta = x / W * 2*pi - pi and phi = y / H * pi.
    Integer pixel (col, row) has its center at (col + 0.5, row + 0.5).
"""

import numpy as np
from dataclasses import dataclass, field
from scipy.spatial.transform import Rotation, Slerp

DEFAULT_POLE_ALPHA = np.deg2rad(10.0)  # half-angle of the arccos linearization


class GeometryError(ValueError):
    pass


def cart_to_sph(v):
    """Cartesian (..., 3) -> (theta, phi, r) arrays, exact arccos latitude."""
    v = np.asarray(v, dtype=np.float64)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(r == 0.0):
        raise GeometryError("zero-length vector has no spherical coordinates")
    theta = np.arctan2(z, x)
    theta = np.where(theta >= np.pi, theta - 2.0 * np.pi, theta)
    phi = np.arccos(np.clip(y / r, -1.0, 1.0))
    return theta, phi, r


def cart_to_sph_safe(v, alpha=DEFAULT_POLE_ALPHA):
    """Like cart_to_sph but with the latitude linearized within `alpha` of the poles.

    The piecewise latitude keeps |d(phi)/d(y/r)| bounded by alpha/(1-cos(alpha)),
    which the exact arccos does not near y/r = +-1.
    """
    if not 0.0 < alpha < np.pi / 2:
        raise GeometryError("alpha must be in (0, pi/2)")
    v = np.asarray(v, dtype=np.float64)
    x, y, z = v[..., 0], v[..., 1], v[..., 2]
    r = np.sqrt(x * x + y * y + z * z)
    if np.any(r == 0.0):
        raise GeometryError("zero-length vector has no spherical coordinates")
    theta = np.arctan2(z, x)
    theta = np.where(theta >= np.pi, theta - 2.0 * np.pi, theta)
    yr = y / r
    ca = np.cos(alpha)
    scale = alpha / (1.0 - ca)
    phi_exact = np.arccos(np.clip(yr, -1.0, 1.0))
    phi_north = scale * (1.0 - yr)
    phi_south = np.pi - scale * (1.0 + yr)
    phi = np.where(np.abs(yr) < ca, phi_exact,
                   np.where(yr > 0.0, phi_north, phi_south))
    return theta, phi, r


def sph_to_cart(theta, phi, r=1.0):
    """(theta, phi, r) -> (..., 3) Cartesian."""
    theta = np.asarray(theta, dtype=np.float64)
    phi = np.asarray(phi, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    sp = np.sin(phi)
    return np.stack([r * sp * np.cos(theta),
                     r * np.cos(phi),
                     r * sp * np.sin(theta)], axis=-1)


def erp_xy_to_dir(x, y, width, height):
    """Continuous ERP image coordinates -> unit directions."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    theta = x / width * 2.0 * np.pi - np.pi
    phi = y / height * np.pi
    return sph_to_cart(theta, phi, 1.0)


def dir_to_erp_xy(v, width, height, safe=False, alpha=DEFAULT_POLE_ALPHA):
    """Directions -> continuous ERP image coordinates (x in [0, W), y in [0, H])."""
    if safe:
        theta, phi, _ = cart_to_sph_safe(v, alpha)
    else:
        theta, phi, _ = cart_to_sph(v)
    x = (theta + np.pi) / (2.0 * np.pi) * width
    y = phi / np.pi * height
    return x, y


def erp_pixel_to_dir(col, row, width, height):
    """Pixel-center directions for integer (or fractional) pixel indices."""
    return erp_xy_to_dir(np.asarray(col) + 0.5, np.asarray(row) + 0.5, width, height)


def dir_to_erp_pixel(v, width, height, safe=False, alpha=DEFAULT_POLE_ALPHA):
    """Directions -> fractional pixel indices (inverse of erp_pixel_to_dir)."""
    x, y = dir_to_erp_xy(v, width, height, safe=safe, alpha=alpha)
    return x - 0.5, y - 0.5


def pixel_dirs(width, height):
    """(H, W, 3) array of unit directions through every pixel center."""
    cols, rows = np.meshgrid(np.arange(width), np.arange(height))
    return erp_pixel_to_dir(cols, rows, width, height)


def _check_rotation(m, tol=1e-6):
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (3, 3):
        raise GeometryError("rotation must be a 3x3 matrix")
    if not np.allclose(m @ m.T, np.eye(3), atol=tol):
        raise GeometryError("rotation matrix is not orthonormal")
    if not np.isclose(np.linalg.det(m), 1.0, atol=tol):
        raise GeometryError("rotation matrix determinant is not +1")
    return m


@dataclass(frozen=True)
class Pose:
    """Rigid transform of a panorama camera: world-from-camera rotation + position."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        p = np.asarray(self.position, dtype=np.float64).reshape(3)
        r = _check_rotation(self.rotation)
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "rotation", r)

    @classmethod
    def from_ypr(cls, yaw, pitch, roll, position=(0.0, 0.0, 0.0)):
        """Yaw/pitch/roll in degrees: yaw about +y, pitch about +z, roll about +x."""
        rot = Rotation.from_euler("yzx", [yaw, pitch, roll], degrees=True)
        return cls(np.asarray(position, dtype=np.float64), rot.as_matrix())

    @classmethod
    def from_json(cls, obj):
        pos = obj.get("position", [0.0, 0.0, 0.0])
        rot = obj.get("rotation", {})
        if "matrix" in rot:
            return cls(pos, np.asarray(rot["matrix"], dtype=np.float64))
        if "ypr_deg" in rot:
            yaw, pitch, roll = rot["ypr_deg"]
            return cls.from_ypr(yaw, pitch, roll, pos)
        if not rot:
            return cls(pos, np.eye(3))
        raise GeometryError("rotation must provide 'matrix' or 'ypr_deg'")

    def to_json(self):
        return {"position": [float(c) for c in self.position],
                "rotation": {"matrix": self.rotation.tolist()}}

    def cam_to_world(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        return pts @ self.rotation.T + self.position

    def world_to_cam(self, pts):
        pts = np.asarray(pts, dtype=np.float64)
        return (pts - self.position) @ self.rotation


def transform_point(pose_src, pose_dst, p):
    """Map points (..., 3) from src camera frame to dst camera frame."""
    return pose_dst.world_to_cam(pose_src.cam_to_world(p))


def interpolate_pose(pose_a, pose_b, t):
    """Linear position / spherical-linear rotation interpolation at t in [0, 1]."""
    pos = (1.0 - t) * pose_a.position + t * pose_b.position
    rots = Rotation.from_matrix(np.stack([pose_a.rotation, pose_b.rotation]))
    rot = Slerp([0.0, 1.0], rots)(float(t)).as_matrix()
    return Pose(pos, rot)


def yaw_matrix(angle):
    """Rotation about +y by `angle` radians."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
