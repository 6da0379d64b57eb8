import numpy as np
import pytest

import omnisynth as om


@pytest.fixture(scope="session")
def street():
    return om.street_canyon()


@pytest.fixture(scope="session")
def street_frames(street):
    """Oracle RGBD frames of the street scene at 0/1/2 m forward motion, 256x256."""
    frames = {}
    for dist in (0.0, 1.0, 2.0):
        pose = om.Pose([dist, 1.6, 0.0])
        img, depth = om.render_erp(street, pose, 256, 256)
        frames[dist] = (img, depth, pose)
    return frames


@pytest.fixture(scope="session")
def street_mesh(street_frames):
    img, depth, _ = street_frames[0.0]
    return om.build_mesh(img, depth)


@pytest.fixture(scope="session")
def street_sweep(street_frames):
    """Depth estimates for the 1 m baseline pair."""
    img0, _, pose0 = street_frames[0.0]
    img1, _, pose1 = street_frames[1.0]
    return om.estimate_depth_pair(img0, pose0, img1, pose1, om.SweepConfig())
