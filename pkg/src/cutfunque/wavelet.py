"""Shared wavelet front-end.

One viewing-distance rescale, one orthonormal Haar decomposition, and one
contrast-sensitivity weighting feed every downstream feature; the multi-scale
local moment pyramid is computed once per frame pair and reused by all of
them. Feature modules consume MomentPyramid / pyramids, never raw frames.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .planes import pad_symmetric_to_multiple, resize_bilinear
from .pucolor import PUFrame

LEVELS = 4
ORIENTATIONS = ("A", "H", "V", "D")
CHANNEL_CLASSES = ("achromatic", "red_green", "blue_yellow")

# Rescale law: the canonical setup (1080 lines viewed at three display
# heights) maps to a factor of 1/2; other geometries scale inversely with
# lines x viewing-heights so the effective sampling density matches.
SAST_CANONICAL_PRODUCT = 1080.0 * 3.0
SAST_CANONICAL_FACTOR = 0.5


def sast_factor(height, viewing_heights):
    if viewing_heights <= 0:
        raise ConfigError("viewing distance must be positive")
    f = SAST_CANONICAL_FACTOR * SAST_CANONICAL_PRODUCT / (height * viewing_heights)
    return float(min(f, 1.0))


def sast_rescale(frame, viewing_heights=3.0):
    """Bilinear downscale accounting for viewing distance; identity when the
    computed factor is 1."""
    f = sast_factor(frame.height, viewing_heights)
    if f == 1.0:
        return frame
    out_shape = (max(1, int(round(frame.height * f))),
                 max(1, int(round(frame.width * f))))
    return PUFrame(l=resize_bilinear(frame.l, out_shape),
                   c=resize_bilinear(frame.c, out_shape))


# ---------------------------------------------------------------------------
# Orthonormal Haar analysis
# ---------------------------------------------------------------------------

@dataclass
class WaveletPyramid:
    """Per-level approximation and detail subbands for one channel.

    Planes live on the mirror-padded grid (dims a multiple of 2^levels) so
    the moment recursion is exact everywhere; ``shape`` records the unpadded
    frame and ``level_shape`` gives the valid (cropped) extent per level.
    ``approx[k]`` / ``details[k]`` hold level k+1; details map H/V/D to
    planes.
    """

    approx: list
    details: list
    shape: tuple

    @property
    def levels(self):
        return len(self.approx)

    def level_shape(self, level):
        return (-(-self.shape[0] // (1 << level)),
                -(-self.shape[1] // (1 << level)))

    def cropped_detail(self, level, orientation):
        ch, cw = self.level_shape(level)
        return self.details[level - 1][orientation][:ch, :cw]

    def cropped_approx(self, level):
        ch, cw = self.level_shape(level)
        return self.approx[level - 1][:ch, :cw]


def _haar_step(plane):
    a = plane[0::2, 0::2]
    b = plane[0::2, 1::2]
    c = plane[1::2, 0::2]
    d = plane[1::2, 1::2]
    return ((a + b + c + d) / 2.0,   # A
            (a + b - c - d) / 2.0,   # H: top minus bottom rows
            (a - b + c - d) / 2.0,   # V: left minus right columns
            (a - b - c + d) / 2.0)   # D


def haar_analyze(plane, levels=LEVELS):
    """Orthonormal 2x2 Haar pyramid, recursing on the approximation band.
    One analysis step preserves energy; the approximation at level k equals
    2^k times the mean of its pixel block."""
    plane = np.asarray(plane)
    orig_shape = plane.shape
    if min(orig_shape) < (1 << levels):
        raise ConfigError(
            f"plane {orig_shape} too small for {levels} wavelet levels")
    work = pad_symmetric_to_multiple(plane, 1 << levels)
    approx, details = [], []
    current = work
    for _ in range(levels):
        a, h, v, d = _haar_step(current)
        approx.append(a)
        details.append({"H": h, "V": v, "D": d})
        current = a
    return WaveletPyramid(approx=approx, details=details, shape=orig_shape)


def analyze_frame(frame, levels=LEVELS):
    """Pyramids for both channels of a PUFrame."""
    return haar_analyze(frame.l, levels), haar_analyze(frame.c, levels)


# ---------------------------------------------------------------------------
# Subband contrast-sensitivity weighting
# ---------------------------------------------------------------------------

@dataclass
class CsfWeights:
    """Scalar weight per (level, orientation, channel class); all positive."""

    table: dict

    def __post_init__(self):
        for key, val in self.table.items():
            if not val > 0:
                raise ConfigError(f"CSF weight {key} must be positive")

    def get(self, level, orientation, channel_class):
        key = (level, orientation, channel_class)
        if key not in self.table:
            raise ConfigError(f"missing CSF weight for {key}")
        return self.table[key]

    @classmethod
    def unit(cls, levels=LEVELS):
        table = {(lv, o, c): 1.0
                 for lv in range(1, levels + 1)
                 for o in ORIENTATIONS
                 for c in CHANNEL_CLASSES}
        return cls(table=table)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            entries = json.load(fh)
        table = {}
        for e in entries:
            table[(int(e["level"]), e["orientation"], e["channel"])] = \
                float(e["weight"])
        return cls(table=table)

    def to_json(self, path):
        entries = [
            {"level": lv, "orientation": o, "channel": c, "weight": w}
            for (lv, o, c), w in sorted(self.table.items())]
        with open(path, "w") as fh:
            json.dump(entries, fh, indent=2)


def apply_csf(pyr, weights, channel_class):
    """Multiply detail subbands (and the deepest approximation band) by
    their sensitivity weights. Complex planes are weighted as a whole."""
    details = []
    for lv, bands in enumerate(pyr.details, start=1):
        details.append({o: bands[o] * weights.get(lv, o, channel_class)
                        for o in ("H", "V", "D")})
    approx = list(pyr.approx)
    approx[-1] = approx[-1] * weights.get(pyr.levels, "A", channel_class)
    return WaveletPyramid(approx=approx, details=details, shape=pyr.shape)


# ---------------------------------------------------------------------------
# Multi-scale local moments
# ---------------------------------------------------------------------------

@dataclass
class ChannelMoments:
    """Per scale: local means, single-signal energies, and the cross term.

    Means are complex for chroma; energies are real and nonnegative; the
    cross term is real for luma and complex for chroma (conjugated test
    side). Maps are cropped to the valid per-scale extent.
    """

    mu_x: list
    mu_y: list
    var_x: list
    var_y: list
    cov_xy: list


@dataclass
class MomentPyramid:
    luma: ChannelMoments
    chroma: ChannelMoments
    shape: tuple

    def scale_shape(self, scale):
        return (-(-self.shape[0] // (1 << scale)),
                -(-self.shape[1] // (1 << scale)))


def _child_sum(plane):
    return (plane[0::2, 0::2] + plane[0::2, 1::2]
            + plane[1::2, 0::2] + plane[1::2, 1::2])


def _channel_moments(x_pyr, y_pyr, complex_mode, crop_shapes):
    mu_x, mu_y, var_x, var_y, cov_xy = [], [], [], [], []
    prev_vx = prev_vy = prev_cxy = None
    for lv in range(1, x_pyr.levels + 1):
        xb, yb = x_pyr.details[lv - 1], y_pyr.details[lv - 1]
        own = 4.0 ** (-lv)
        ex = own * sum((xb[o] * np.conj(xb[o])).real for o in ("H", "V", "D"))
        ey = own * sum((yb[o] * np.conj(yb[o])).real for o in ("H", "V", "D"))
        if complex_mode:
            exy = own * sum(xb[o] * np.conj(yb[o]) for o in ("H", "V", "D"))
        else:
            exy = own * sum(xb[o] * yb[o] for o in ("H", "V", "D"))

        if prev_vx is None:
            vx, vy, cxy = ex, ey, exy
        else:
            vx = 0.25 * _child_sum(prev_vx) + ex
            vy = 0.25 * _child_sum(prev_vy) + ey
            cxy = 0.25 * _child_sum(prev_cxy) + exy
        prev_vx, prev_vy, prev_cxy = vx, vy, cxy

        ch, cw = crop_shapes[lv - 1]
        mu_x.append(x_pyr.approx[lv - 1][:ch, :cw] * 2.0 ** (-lv))
        mu_y.append(y_pyr.approx[lv - 1][:ch, :cw] * 2.0 ** (-lv))
        var_x.append(np.maximum(vx[:ch, :cw], 0.0))
        var_y.append(np.maximum(vy[:ch, :cw], 0.0))
        cov_xy.append(cxy[:ch, :cw])
    return ChannelMoments(mu_x=mu_x, mu_y=mu_y, var_x=var_x, var_y=var_y,
                          cov_xy=cov_xy)


def build_moments(ref_luma_pyr, test_luma_pyr, ref_chroma_pyr, test_chroma_pyr):
    """Multi-scale window moments for both channels, computed with the
    per-level recursion (children average plus the level's own detail
    energy). The recursion runs on the padded grid and the resulting maps
    are cropped per scale."""
    if ref_luma_pyr.shape != test_luma_pyr.shape:
        raise ConfigError("reference and test pyramids differ in shape")
    crops = [ref_luma_pyr.level_shape(lv)
             for lv in range(1, ref_luma_pyr.levels + 1)]
    luma = _channel_moments(ref_luma_pyr, test_luma_pyr, False, crops)
    chroma = _channel_moments(ref_chroma_pyr, test_chroma_pyr, True, crops)
    return MomentPyramid(luma=luma, chroma=chroma, shape=ref_luma_pyr.shape)
