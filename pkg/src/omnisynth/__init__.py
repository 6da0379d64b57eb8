"""Wide-baseline 360-degree panorama view synthesis.

Pipeline: spherical-sweep stereo depth -> discontinuity-culled spherical mesh
rendering -> visibility-driven fusion and inpainting, evaluated with WS-PSNR
and inverse-depth metrics against an analytic raycast scene oracle.
"""

from .geometry import (Pose, cart_to_sph, cart_to_sph_safe, sph_to_cart,
                       erp_pixel_to_dir, dir_to_erp_pixel, pixel_dirs,
                       transform_point, interpolate_pose, GeometryError)
from .pano_io import (read_rgb, write_rgb, read_depth, write_depth,
                      read_pose, write_pose, read_frame, write_frame, FormatError)
from .cubemap import CubemapFaces, stitch_cubemap
from .scene import (Scene, Box, raycast, render_erp, render_cubemap,
                    make_sequence, street_canyon, room, load_scene)
from .sweep import (SweepConfig, CostVolume, DepthEstimate, build_cost_volume,
                    extract_depth, estimate_depth_pair, DegenerateBaselineError)
from .mesh import (MeshConfig, SphericalMesh, GradientMaps, depth_gradients,
                   build_mesh, save_obj)
from .raster import (RasterConfig, RenderOutput, render_mesh, render_points,
                     hole_fraction)
from .fusion import FusionConfig, fuse, inpaint, synthesize_sequence
from .metrics import (ValidRange, DepthMetrics, depth_metrics, ws_psnr,
                      ws_weights, eval_triplet)

__version__ = "0.1.0"
