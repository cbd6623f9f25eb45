"""Local min-max normalization followed by a double-exponential expansion.

Emphasizes the darkest and brightest parts of each neighborhood: values are
remapped to [-1, 1] against the local window extremes, then stretched by
sgn(x) * (exp(g|x|) - 1). Both the luma plane and the two chroma components
are processed independently.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .pucolor import PUFrame


@dataclass
class HdrmaxConfig:
    window: int = 17
    gain: float = 4.0

    def __post_init__(self):
        if self.window < 3 or self.window % 2 == 0:
            raise ConfigError("window must be odd and >= 3")


def _sliding_extrema_axis(plane, window, ufunc, pad_value):
    """O(n) sliding extrema along the last axis via block prefix/suffix
    scans, with symmetric (edge-inclusive mirror) padding."""
    r = window // 2
    n = plane.shape[-1]
    x = np.pad(plane, [(0, 0)] * (plane.ndim - 1) + [(r, r)], mode="symmetric")
    m = x.shape[-1]
    nblocks = -(-m // window)
    total = nblocks * window
    if total > m:
        fill = np.full(x.shape[:-1] + (total - m,), pad_value, dtype=x.dtype)
        x = np.concatenate([x, fill], axis=-1)
    blocks = x.reshape(x.shape[:-1] + (nblocks, window))
    prefix = ufunc.accumulate(blocks, axis=-1).reshape(x.shape[:-1] + (total,))
    suffix = ufunc.accumulate(blocks[..., ::-1], axis=-1)[..., ::-1]
    suffix = suffix.reshape(x.shape[:-1] + (total,))
    return ufunc(suffix[..., :n], prefix[..., window - 1:window - 1 + n])


def sliding_min(plane, window):
    out = _sliding_extrema_axis(plane, window, np.minimum, np.inf)
    return _sliding_extrema_axis(out.T, window, np.minimum, np.inf).T


def sliding_max(plane, window):
    out = _sliding_extrema_axis(plane, window, np.maximum, -np.inf)
    return _sliding_extrema_axis(out.T, window, np.maximum, -np.inf).T


def minmax_normalize(plane, cfg=None):
    """Map each pixel to [-1, 1] against its window's min/max; flat windows
    (max == min) map to 0."""
    cfg = cfg or HdrmaxConfig()
    plane = np.asarray(plane, dtype=np.float64)
    lo = sliding_min(plane, cfg.window)
    hi = sliding_max(plane, cfg.window)
    rng = hi - lo
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 2.0 * (plane - lo) / rng - 1.0
    return np.where(rng > 0.0, out, 0.0)


def expand(plane, gain=4.0):
    """Odd double-exponential stretch of values in [-1, 1]."""
    plane = np.asarray(plane, dtype=np.float64)
    return np.sign(plane) * (np.exp(gain * np.abs(plane)) - 1.0)


def hdrmax_plane(plane, cfg=None):
    cfg = cfg or HdrmaxConfig()
    return expand(minmax_normalize(plane, cfg), cfg.gain)


def hdrmax_frame(frame, cfg=None):
    """Apply the transform to the luma plane and to each chroma component."""
    cfg = cfg or HdrmaxConfig()
    l = hdrmax_plane(frame.l, cfg)
    a = hdrmax_plane(frame.c.real, cfg)
    b = hdrmax_plane(frame.c.imag, cfg)
    return PUFrame(l=l, c=a + 1j * b)
