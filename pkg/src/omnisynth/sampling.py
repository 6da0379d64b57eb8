"""Bilinear sampling of ERP images with horizontal wrap."""

import numpy as np


def _corners(x, y, width, height, wrap_x=True):
    gx = np.asarray(x, dtype=np.float64) - 0.5
    gy = np.asarray(y, dtype=np.float64) - 0.5
    x0 = np.floor(gx).astype(np.int64)
    y0 = np.floor(gy).astype(np.int64)
    fx = gx - x0
    fy = gy - y0
    x1 = x0 + 1
    y1 = y0 + 1
    if wrap_x:
        x0 %= width
        x1 %= width
    else:
        x0 = np.clip(x0, 0, width - 1)
        x1 = np.clip(x1, 0, width - 1)
    y0 = np.clip(y0, 0, height - 1)
    y1 = np.clip(y1, 0, height - 1)
    return x0, x1, y0, y1, fx, fy


def sample_bilinear(img, x, y, wrap_x=True):
    """Sample (H, W[, C]) `img` at continuous coords; columns wrap, rows clamp."""
    img = np.asarray(img)
    h, w = img.shape[:2]
    x0, x1, y0, y1, fx, fy = _corners(x, y, w, h, wrap_x)
    if img.ndim == 3:
        fx = fx[..., None]
        fy = fy[..., None]
    c00 = img[y0, x0]
    c01 = img[y0, x1]
    c10 = img[y1, x0]
    c11 = img[y1, x1]
    top = c00 * (1.0 - fx) + c01 * fx
    bot = c10 * (1.0 - fx) + c11 * fx
    return top * (1.0 - fy) + bot * fy


def sample_depth_bilinear(depth, x, y, wrap_x=True):
    """Bilinear depth sample plus a validity flag.

    A sample is valid only if all four contributing texels are non-negative
    (negative depth encodes holes).
    """
    depth = np.asarray(depth)
    h, w = depth.shape
    x0, x1, y0, y1, fx, fy = _corners(x, y, w, h, wrap_x)
    c00 = depth[y0, x0]
    c01 = depth[y0, x1]
    c10 = depth[y1, x0]
    c11 = depth[y1, x1]
    valid = (c00 >= 0) & (c01 >= 0) & (c10 >= 0) & (c11 >= 0)
    top = c00 * (1.0 - fx) + c01 * fx
    bot = c10 * (1.0 - fx) + c11 * fx
    return top * (1.0 - fy) + bot * fy, valid
