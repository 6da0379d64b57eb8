"""Command-line interface for the panorama synthesis pipeline.

Subcommands: gen-scene, depth, render, synthesize, eval, ablate-renderers.
Stages compose through files (PNG color, PFM depth, JSON poses) so each is
independently testable.  Exit codes: 0 success, 1 usage error, 2 data/IO
error, 3 numerical or degenerate-input error.  Outputs are written atomically
(temp file + rename).
"""

import argparse
import json
import logging
import os
import sys
import tempfile

import numpy as np

from . import pano_io, scene as scene_mod
from .fusion import FusionConfig, synthesize_sequence
from .geometry import GeometryError, Pose
from .mesh import MeshConfig, build_mesh
from .metrics import ValidRange, depth_metrics, ws_psnr
from .pano_io import FormatError
from .raster import RasterConfig, hole_fraction, render_mesh, render_points
from .sweep import DegenerateBaselineError, SweepConfig, estimate_depth_pair

log = logging.getLogger("omnisynth")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _atomic(path, write_fn):
    """Write via write_fn(tmp_path) then rename into place."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.splitext(path)[1])
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_rgb(img, path):
    _atomic(path, lambda p: pano_io.write_rgb(img, p))


def _atomic_depth(depth, path):
    _atomic(path, lambda p: pano_io.write_depth(depth, p))


def _atomic_text(text, path):
    def w(p):
        with open(p, "w") as f:
            f.write(text)
    _atomic(path, w)


def _parse_vec3(s):
    parts = [float(v) for v in s.split(",")]
    if len(parts) != 3:
        raise UsageError(f"expected x,y,z triple, got {s!r}")
    return np.array(parts)


def _sweep_config(args):
    return SweepConfig(n_levels=args.levels, d_min=args.dmin, d_max=args.dmax,
                       window=args.window)


def _add_sweep_flags(p):
    p.add_argument("--levels", type=int, default=64, help="inverse-depth hypotheses")
    p.add_argument("--dmin", type=float, default=1.0, help="nearest depth (m)")
    p.add_argument("--dmax", type=float, default=50.0, help="farthest depth (m)")
    p.add_argument("--window", type=int, default=5, help="odd cost aggregation window")


def cmd_gen_scene(args):
    sc = scene_mod.load_scene(args.scene)
    if args.seed is not None:
        sc.seed = args.seed
    start = Pose(_parse_vec3(args.position))
    frames = scene_mod.make_sequence(sc, start, _parse_vec3(args.heading),
                                     args.baseline, args.frames,
                                     width=args.width, height=args.height)
    os.makedirs(args.out, exist_ok=True)
    for i, (img, depth, pose) in enumerate(frames):
        prefix = pano_io.frame_prefix(args.out, i)
        _atomic_rgb(img, prefix + ".png")
        _atomic_depth(depth, prefix + ".pfm")
        _atomic_text(json.dumps(pose.to_json(), indent=2) + "\n", prefix + ".json")
        log.info("wrote %s.{png,pfm,json}", prefix)
    _atomic_text(json.dumps(scene_mod.scene_to_json(sc), indent=2, sort_keys=True) + "\n",
                 os.path.join(args.out, "scene.json"))
    return 0


def cmd_depth(args):
    ref = pano_io.read_rgb(args.ref)
    other = pano_io.read_rgb(args.other)
    with open(args.poses) as f:
        poses = json.load(f)
    pose_ref = Pose.from_json(poses["ref"])
    pose_other = Pose.from_json(poses["other"])
    cfg = _sweep_config(args)
    est_ref, _ = estimate_depth_pair(ref, pose_ref, other, pose_other, cfg)
    _atomic_depth(est_ref.masked_depth(), args.out)
    log.info("wrote %s", args.out)
    return 0


def cmd_render(args):
    img, depth, src_pose = pano_io.read_frame(args.mesh_from)
    if depth is None or src_pose is None:
        raise FileNotFoundError(f"{args.mesh_from}.pfm / .json required for rendering")
    target = pano_io.read_pose(args.at)
    h, w = depth.shape
    cfg = RasterConfig(width=args.width or w, height=args.height or h,
                       splat_radius=args.splat_radius)
    if args.mode == "mesh":
        mesh = build_mesh(img, depth, MeshConfig(k=args.k))
        if args.export_obj:
            from .mesh import save_obj
            _atomic(args.export_obj, lambda p: save_obj(mesh, p))
        out = render_mesh(mesh, src_pose, target, cfg)
    else:
        out = render_points(img, depth, src_pose, target, cfg)
    _atomic_rgb(out.color, args.out + ".png")
    _atomic_depth(out.depth, args.out + ".pfm")
    log.info("wrote %s.{png,pfm}; hole fraction %.4f", args.out, hole_fraction(out))
    return 0


def cmd_synthesize(args):
    img_a, depth_a, pose_a = pano_io.read_frame(args.a)
    img_b, depth_b, pose_b = pano_io.read_frame(args.b)
    if pose_a is None or pose_b is None:
        raise FileNotFoundError("both input frames need .json pose files")
    if args.depth_a:
        depth_a = pano_io.read_depth(args.depth_a)
    elif not args.use_frame_depth:
        depth_a = None
    if args.depth_b:
        depth_b = pano_io.read_depth(args.depth_b)
    elif not args.use_frame_depth:
        depth_b = None
    frames, poses = synthesize_sequence(
        img_a, pose_a, img_b, pose_b, args.frames,
        sweep_cfg=_sweep_config(args), mesh_cfg=MeshConfig(k=args.k),
        fusion_cfg=FusionConfig(), depth0=depth_a, depth1=depth_b)
    os.makedirs(args.out, exist_ok=True)
    manifest = []
    for i, (frame, pose) in enumerate(zip(frames, poses)):
        prefix = pano_io.frame_prefix(args.out, i)
        _atomic_rgb(frame, prefix + ".png")
        manifest.append({"frame": f"{i:04d}.png", "pose": pose.to_json()})
    _atomic_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                 os.path.join(args.out, "manifest.json"))
    log.info("wrote %d frames to %s", len(frames), args.out)
    return 0


def cmd_eval(args):
    names = sorted(f for f in os.listdir(args.pred) if f.endswith(".png"))
    if not names:
        raise FileNotFoundError(f"no PNG frames in {args.pred}")
    report = {"frames": {}, "mean_ws_psnr_db": None}
    psnrs = []
    for name in names:
        gt_path = os.path.join(args.gt, name)
        if not os.path.exists(gt_path):
            continue
        pred = pano_io.read_rgb(os.path.join(args.pred, name))
        gt = pano_io.read_rgb(gt_path)
        entry = {"ws_psnr_db": ws_psnr(pred, gt)}
        pfm = name.replace(".png", ".pfm")
        if (os.path.exists(os.path.join(args.pred, pfm))
                and os.path.exists(os.path.join(args.gt, pfm))):
            dm = depth_metrics(pano_io.read_depth(os.path.join(args.pred, pfm)),
                               pano_io.read_depth(os.path.join(args.gt, pfm)),
                               ValidRange(args.dmin, args.dmax))
            entry["depth"] = dm.to_dict()
        report["frames"][name] = entry
        psnrs.append(entry["ws_psnr_db"])
    if not psnrs:
        raise FileNotFoundError("no overlapping frames between --pred and --gt")
    report["mean_ws_psnr_db"] = float(np.mean(psnrs))
    _atomic_text(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    log.info("wrote %s", args.out)
    return 0


def cmd_ablate_renderers(args):
    sc = scene_mod.load_scene(args.scene)
    start = Pose(_parse_vec3(args.position))
    img, depth = scene_mod.render_erp(sc, start, args.width, args.height)
    mesh = build_mesh(img, depth, MeshConfig(k=args.k))
    cfg = RasterConfig(width=args.width, height=args.height,
                       splat_radius=args.splat_radius)
    heading = _parse_vec3(args.heading)
    heading = heading / np.linalg.norm(heading)
    lines = ["renderer,distance_m,hole_fraction"]
    for dist in [float(v) for v in args.distances.split(",")]:
        target = Pose(start.position + dist * heading, start.rotation)
        hf_mesh = hole_fraction(render_mesh(mesh, start, target, cfg))
        hf_pts = hole_fraction(render_points(img, depth, start, target, cfg))
        lines.append(f"mesh,{dist:g},{hf_mesh:.6f}")
        lines.append(f"points,{dist:g},{hf_pts:.6f}")
        log.info("distance %g m: mesh %.4f, points %.4f", dist, hf_mesh, hf_pts)
    _atomic_text("\n".join(lines) + "\n", args.out)
    return 0


def build_parser():
    p = _Parser(prog="omnisynth",
                description="Wide-baseline 360 panorama view synthesis pipeline")
    p.add_argument("--verbose", action="store_true", help="log progress to stderr")
    p.add_argument("--threads", type=int,
                   default=int(os.environ.get("OMNISYNTH_THREADS", "1")),
                   help="worker threads (outputs are identical for any value)")
    p.add_argument("--seed", type=int, default=None, help="scene seed override")
    sub = p.add_subparsers(dest="command")

    g = sub.add_parser("gen-scene", help="render oracle RGBD frame sequences")
    g.add_argument("--scene", required=True, help="preset name or scene JSON path")
    g.add_argument("--out", required=True)
    g.add_argument("--frames", type=int, default=2)
    g.add_argument("--baseline", type=float, default=1.0)
    g.add_argument("--width", type=int, default=256)
    g.add_argument("--height", type=int, default=256)
    g.add_argument("--position", default="0,1.6,0")
    g.add_argument("--heading", default="1,0,0")
    g.set_defaults(func=cmd_gen_scene)

    d = sub.add_parser("depth", help="spherical-sweep stereo depth")
    d.add_argument("--ref", required=True)
    d.add_argument("--other", required=True)
    d.add_argument("--poses", required=True,
                   help='JSON {"ref": pose, "other": pose}')
    d.add_argument("--out", required=True)
    _add_sweep_flags(d)
    d.set_defaults(func=cmd_depth)

    r = sub.add_parser("render", help="render a frame's mesh or points at a pose")
    r.add_argument("--mesh-from", required=True, dest="mesh_from",
                   help="frame prefix (reads PREFIX.{png,pfm,json})")
    r.add_argument("--at", required=True, help="target pose JSON")
    r.add_argument("--out", required=True, help="output prefix (writes .png/.pfm)")
    r.add_argument("--mode", choices=("mesh", "points"), default="mesh")
    r.add_argument("--k", type=float, default=1.0, help="discontinuity threshold (m)")
    r.add_argument("--splat-radius", type=float, default=0.5)
    r.add_argument("--width", type=int, default=None)
    r.add_argument("--height", type=int, default=None)
    r.add_argument("--export-obj", default=None, help="also write the mesh as OBJ")
    r.set_defaults(func=cmd_render)

    s = sub.add_parser("synthesize", help="synthesize intermediate panoramas")
    s.add_argument("--a", required=True, help="first frame prefix")
    s.add_argument("--b", required=True, help="second frame prefix")
    s.add_argument("--frames", type=int, default=1)
    s.add_argument("--out", required=True)
    s.add_argument("--depth-a", default=None, help="precomputed depth PFM for a")
    s.add_argument("--depth-b", default=None, help="precomputed depth PFM for b")
    s.add_argument("--use-frame-depth", action="store_true",
                   help="use the frames' own .pfm depth (e.g. ground truth)")
    s.add_argument("--k", type=float, default=1.0)
    _add_sweep_flags(s)
    s.set_defaults(func=cmd_synthesize)

    e = sub.add_parser("eval", help="score predicted frames against ground truth")
    e.add_argument("--pred", required=True)
    e.add_argument("--gt", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--dmin", type=float, default=1.0)
    e.add_argument("--dmax", type=float, default=50.0)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("ablate-renderers",
                       help="mesh vs point-cloud hole fractions over distance")
    a.add_argument("--scene", required=True)
    a.add_argument("--distances", default="1,2,3,4")
    a.add_argument("--out", required=True, help="output CSV path")
    a.add_argument("--width", type=int, default=256)
    a.add_argument("--height", type=int, default=256)
    a.add_argument("--position", default="0,1.6,0")
    a.add_argument("--heading", default="1,0,0")
    a.add_argument("--k", type=float, default=1.0)
    a.add_argument("--splat-radius", type=float, default=0.5)
    a.set_defaults(func=cmd_ablate_renderers)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 0
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (FileNotFoundError, OSError, FormatError, json.JSONDecodeError) as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except (GeometryError, DegenerateBaselineError, ValueError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
