"""Cubemap faces and their stitching into ERP panoramas.

Face axes (camera frame, +x forward, +y up, theta grows toward +z):

    name    forward   right    down
    front     +x        +z      -y
    right     +z        -x      -y
    back      -x        -z      -y
    left      -z        +x      -y
    up        +y        +z      +x
    down      -y        +z      -x

Pixel (col, row) of an F x F face looks along
forward + u * right + v * down with u = (col+0.5)/F*2-1, v = (row+0.5)/F*2-1
(90 degree field of view).  Depth faces store perspective z-depth along the
face's forward axis.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import pixel_dirs
from .sampling import sample_bilinear

FACE_NAMES = ("front", "right", "back", "left", "up", "down")

# rows: forward, right, down for each face, in camera frame
FACE_AXES = np.array([
    [[1, 0, 0], [0, 0, 1], [0, -1, 0]],
    [[0, 0, 1], [-1, 0, 0], [0, -1, 0]],
    [[-1, 0, 0], [0, 0, -1], [0, -1, 0]],
    [[0, 0, -1], [1, 0, 0], [0, -1, 0]],
    [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
    [[0, -1, 0], [0, 0, 1], [-1, 0, 0]],
], dtype=np.float64)


@dataclass
class CubemapFaces:
    """Six square RGB faces (6, F, F, 3) plus optional z-depth faces (6, F, F)."""

    colors: np.ndarray
    depths: np.ndarray | None = None

    def __post_init__(self):
        self.colors = np.asarray(self.colors, dtype=np.float64)
        if self.colors.shape[0] != 6 or self.colors.shape[1] != self.colors.shape[2]:
            raise ValueError("colors must be (6, F, F, 3)")
        if self.depths is not None:
            self.depths = np.asarray(self.depths, dtype=np.float64)
            if self.depths.shape != self.colors.shape[:3]:
                raise ValueError("depth faces must match color faces in size")

    @property
    def face_size(self):
        return self.colors.shape[1]


def face_ray_dirs(face_index, face_size):
    """(F, F, 3) unit direction per pixel of one face, camera frame."""
    f, r, d = FACE_AXES[face_index]
    span = (np.arange(face_size) + 0.5) / face_size * 2.0 - 1.0
    u, v = np.meshgrid(span, span)
    dirs = f + u[..., None] * r + v[..., None] * d
    return dirs / np.linalg.norm(dirs, axis=-1, keepdims=True)


def _erp_face_lookup(width, height):
    """Per-ERP-pixel face index and continuous face coordinates."""
    dirs = pixel_dirs(width, height)  # (H, W, 3)
    dots = dirs @ FACE_AXES[:, 0].T   # (H, W, 6) forward components
    face = np.argmax(dots, axis=-1)
    fwd = np.take_along_axis(dots, face[..., None], axis=-1)[..., 0]
    right = np.einsum("hwc,fc->hwf", dirs, FACE_AXES[:, 1])
    down = np.einsum("hwc,fc->hwf", dirs, FACE_AXES[:, 2])
    u = np.take_along_axis(right, face[..., None], axis=-1)[..., 0] / fwd
    v = np.take_along_axis(down, face[..., None], axis=-1)[..., 0] / fwd
    return face, u, v, fwd


def stitch_cubemap(faces, width, height):
    """Stitch six faces into an (H, W, 3) ERP image (bilinear, no seam blending).

    Returns (erp_rgb, erp_depth); erp_depth is None unless the faces carry
    depth, in which case perspective z-depth is converted to Euclidean ray
    length.
    """
    fsize = faces.face_size
    face, u, v, fwd = _erp_face_lookup(width, height)
    x = (u + 1.0) / 2.0 * fsize
    y = (v + 1.0) / 2.0 * fsize
    out = np.zeros((height, width, 3))
    out_d = np.zeros((height, width)) if faces.depths is not None else None
    for i in range(6):
        sel = face == i
        out[sel] = sample_bilinear(faces.colors[i], x[sel], y[sel], wrap_x=False)
        if out_d is not None:
            z = sample_bilinear(faces.depths[i], x[sel], y[sel], wrap_x=False)
            out_d[sel] = z / fwd[sel]
    return out, out_d
