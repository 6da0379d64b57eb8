"""Load/store panoramas, depth maps, and pose files.

Formats: 8-bit RGB PNG for color, grayscale 32-bit PFM (little-endian,
scale -1.0) for depth, JSON for poses.  Frame sequences are directories of
numbered stills `NNNN.{png,pfm,json}`.
"""

import json
import os

import numpy as np
from PIL import Image, UnidentifiedImageError

from .geometry import Pose


class FormatError(ValueError):
    pass


def read_rgb(path):
    """Read an 8-bit RGB PNG into an (H, W, 3) float array in [0, 1]."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
    except UnidentifiedImageError as e:
        raise FormatError(f"not a readable image: {path}") from e
    return arr / 255.0


def write_rgb(img, path):
    """Write an (H, W, 3) float array in [0, 1] as 8-bit RGB PNG (round half up)."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3:
        raise FormatError("expected an (H, W, 3) array")
    q = np.clip(np.floor(img * 255.0 + 0.5), 0, 255).astype(np.uint8)
    Image.fromarray(q, mode="RGB").save(path, format="PNG")


def read_depth(path):
    """Read a grayscale little-endian PFM depth map into an (H, W) float array."""
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path, "rb") as f:
        magic = f.readline().strip()
        if magic != b"Pf":
            raise FormatError(f"bad PFM magic {magic!r} (expected 'Pf')")
        dims = f.readline().split()
        if len(dims) != 2:
            raise FormatError("bad PFM dimension line")
        width, height = int(dims[0]), int(dims[1])
        scale = float(f.readline())
        if scale >= 0:
            raise FormatError("big-endian PFM not supported (scale must be < 0)")
        buf = f.read(width * height * 4)
        if len(buf) != width * height * 4:
            raise FormatError("truncated PFM payload")
    data = np.frombuffer(buf, dtype="<f4").reshape(height, width)
    return np.flipud(data).astype(np.float64)  # PFM rows are bottom-to-top


def write_depth(depth, path):
    """Write an (H, W) float array as grayscale PFM (lossless for float32 values)."""
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2:
        raise FormatError("expected an (H, W) array")
    h, w = depth.shape
    with open(path, "wb") as f:
        f.write(b"Pf\n")
        f.write(f"{w} {h}\n".encode("ascii"))
        f.write(b"-1.0\n")
        f.write(np.flipud(depth).astype("<f4").tobytes())


def read_pose(path):
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    with open(path) as f:
        try:
            obj = json.load(f)
        except json.JSONDecodeError as e:
            raise FormatError(f"malformed pose JSON: {path}") from e
    return Pose.from_json(obj)


def write_pose(pose, path):
    with open(path, "w") as f:
        json.dump(pose.to_json(), f, indent=2)
        f.write("\n")


def frame_prefix(directory, index):
    return os.path.join(directory, f"{index:04d}")


def write_frame(prefix, img=None, depth=None, pose=None):
    """Write the `prefix.{png,pfm,json}` triple (any subset)."""
    if img is not None:
        write_rgb(img, prefix + ".png")
    if depth is not None:
        write_depth(depth, prefix + ".pfm")
    if pose is not None:
        write_pose(pose, prefix + ".json")


def read_frame(prefix):
    """Read the `prefix.{png,pfm,json}` triple; missing pfm/json come back as None."""
    img = read_rgb(prefix + ".png")
    depth = read_depth(prefix + ".pfm") if os.path.exists(prefix + ".pfm") else None
    pose = read_pose(prefix + ".json") if os.path.exists(prefix + ".json") else None
    return img, depth, pose
