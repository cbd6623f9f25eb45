import numpy as np
import pytest

from cutfunque.pucolor import PUFrame
from cutfunque.video_io import VideoSpec, write_y4m


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


def random_pu_frame(rng, shape=(64, 64), lo=0.0, hi=1.0):
    l = rng.uniform(lo, hi, size=shape)
    c = rng.uniform(-0.3, 0.3, size=shape) + 1j * rng.uniform(-0.3, 0.3, size=shape)
    return PUFrame(l=l, c=c)


def smooth_plane(rng, shape=(64, 64), smoothness=8, lo=0.0, hi=1.0):
    """Band-limited random plane: bilinear upsample of a coarse grid."""
    from cutfunque.planes import resize_bilinear
    coarse = rng.uniform(lo, hi, size=(max(2, shape[0] // smoothness),
                                       max(2, shape[1] // smoothness)))
    return resize_bilinear(coarse, shape)


def make_pq_video(path, rng, num_frames=3, size=(64, 64), motion=True,
                  noise_planes=None, noise_scale=0.0):
    """Synthetic 10-bit 4:2:0 PQ/BT.2020 y4m with smooth drifting content.

    ``noise_planes`` (y, cb, cr float patterns) scaled by ``noise_scale``
    are added to the code values before clipping, for distortion sweeps.
    """
    spec = VideoSpec(width=size[1], height=size[0], bit_depth=10,
                     chroma_subsampling="420", transfer="pq", gamut="bt2020",
                     frame_rate=30.0)
    h, w = size
    base_y = 64 + 700 * np.abs(smooth_plane(rng, size, smoothness=8))
    base_cb = 512 + 120 * smooth_plane(rng, (h // 2, w // 2), 4, -1, 1)
    base_cr = 512 + 120 * smooth_plane(rng, (h // 2, w // 2), 4, -1, 1)
    frames = []
    for t in range(num_frames):
        shift = (3 * t) % w if motion else 0
        y = np.roll(base_y, shift, axis=1) + (8 * t if motion else 0)
        cb, cr = base_cb.copy(), base_cr.copy()
        if noise_planes is not None and noise_scale:
            y = y + noise_scale * noise_planes[0][t]
            cb = cb + noise_scale * noise_planes[1][t]
            cr = cr + noise_scale * noise_planes[2][t]
        frames.append((
            np.clip(np.round(y), 64, 940).astype(np.uint16),
            np.clip(np.round(cb), 64, 960).astype(np.uint16),
            np.clip(np.round(cr), 64, 960).astype(np.uint16),
        ))
    write_y4m(path, frames, spec)
    return spec


@pytest.fixture(scope="session")
def default_calibration():
    from cutfunque.cli import load_default_calibration
    return load_default_calibration()


@pytest.fixture(scope="session")
def default_csf():
    from cutfunque.cli import load_default_csf
    return load_default_csf()


@pytest.fixture(scope="session")
def manifest():
    from cutfunque.cli import load_manifest
    return load_manifest()
