"""Raw video ingest: planar YCbCr (.yuv / .y4m) to absolute linear-light LMS.

The decode chain is YCbCr -> R'G'B' (gamut matrix, limited or full range) ->
linear RGB via the declared transfer EOTF -> absolute nits via peak luminance
-> XYZ (gamut primaries, D65 white) -> LMS cone responses. The LMS matrix is
normalized so that x_L + x_M equals luminance in nits at every pixel, which
the downstream perceptual encoding relies on.
"""

import io
import os
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DecodeError
from .planes import resize_bilinear

VALID_BIT_DEPTHS = (8, 10, 12)
VALID_SUBSAMPLING = ("420", "444")
VALID_TRANSFERS = ("pq", "hlg", "bt1886")
VALID_GAMUTS = ("bt709", "bt2020")


@dataclass
class VideoSpec:
    """Layout and color description of a raw video stream."""

    width: int = None
    height: int = None
    bit_depth: int = 10
    chroma_subsampling: str = "420"
    transfer: str = "pq"
    gamut: str = "bt2020"
    frame_rate: float = 30.0
    peak_luminance: float = None
    full_range: bool = False

    def __post_init__(self):
        if self.peak_luminance is None:
            # HLG carries a nominal 1000 nit peak; SDR defaults to 100.
            self.peak_luminance = {"pq": 10000.0, "hlg": 1000.0,
                                   "bt1886": 100.0}[self.transfer]
        self.validate()

    def validate(self):
        if self.bit_depth not in VALID_BIT_DEPTHS:
            raise ConfigError(f"unsupported bit depth {self.bit_depth}")
        if self.chroma_subsampling not in VALID_SUBSAMPLING:
            raise ConfigError(
                f"unsupported chroma subsampling {self.chroma_subsampling}")
        if self.transfer not in VALID_TRANSFERS:
            raise ConfigError(f"unknown transfer {self.transfer}")
        if self.gamut not in VALID_GAMUTS:
            raise ConfigError(f"unknown gamut {self.gamut}")
        if self.width is not None and self.height is not None:
            if self.width <= 0 or self.height <= 0:
                raise ConfigError("frame dimensions must be positive")
            if self.chroma_subsampling == "420" and (
                    self.width % 2 or self.height % 2):
                raise ConfigError("4:2:0 requires even dimensions")

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown video spec fields: {sorted(extra)}")
        return cls(**d)

    @property
    def bytes_per_sample(self):
        return 1 if self.bit_depth == 8 else 2

    @property
    def frame_bytes(self):
        n = self.width * self.height
        chroma = n // 4 if self.chroma_subsampling == "420" else n
        return (n + 2 * chroma) * self.bytes_per_sample


@dataclass
class LinearFrame:
    """Linear-light cone-response planes; x_L + x_M is luminance in nits."""

    l_plane: np.ndarray
    m_plane: np.ndarray
    s_plane: np.ndarray

    @property
    def height(self):
        return self.l_plane.shape[0]

    @property
    def width(self):
        return self.l_plane.shape[1]

    @property
    def luminance(self):
        return self.l_plane + self.m_plane


@dataclass
class FrameBuffer:
    """Temporal state carried across frames in display order.

    ``ring`` keeps up to the four most recent reference luma planes (current
    frame last) for the temporal-complexity measure; ``prev`` holds the
    previous frame's post-rescale encoded planes per (side, variant) key for
    frame differencing.
    """

    ring: deque = field(default_factory=lambda: deque(maxlen=4))
    prev: dict = field(default_factory=dict)

    def push_ref_luma(self, plane):
        self.ring.append(plane)

    @property
    def frames(self):
        return list(self.ring)


# ---------------------------------------------------------------------------
# Transfer functions (EOTFs), vectorized over numpy arrays of normalized
# non-linear signal in [0, 1]. Outputs are absolute luminance contributions
# in nits.
# ---------------------------------------------------------------------------

_PQ_M1 = 2610.0 / 16384.0
_PQ_M2 = 2523.0 / 4096.0 * 128.0
_PQ_C1 = 3424.0 / 4096.0
_PQ_C2 = 2413.0 / 4096.0 * 32.0
_PQ_C3 = 2392.0 / 4096.0 * 32.0

_HLG_A = 0.17883277
_HLG_B = 1.0 - 4.0 * _HLG_A
_HLG_C = 0.5 - _HLG_A * np.log(4.0 * _HLG_A)


def pq_eotf(signal, peak_luminance=10000.0):
    """SMPTE ST 2084 EOTF. ``peak_luminance`` only rescales the nominal
    10000 nit output (kept at 10000 for mastering-referred PQ)."""
    e = np.clip(np.asarray(signal, dtype=np.float64), 0.0, 1.0)
    ep = np.power(e, 1.0 / _PQ_M2)
    num = np.maximum(ep - _PQ_C1, 0.0)
    den = _PQ_C2 - _PQ_C3 * ep
    return (peak_luminance / 10000.0) * 10000.0 * np.power(num / den, 1.0 / _PQ_M1)


def hlg_inverse_oetf(signal):
    """HLG OETF inverse: non-linear scene signal to linear scene light in
    [0, 1]."""
    e = np.clip(np.asarray(signal, dtype=np.float64), 0.0, 1.0)
    low = (e * e) / 3.0
    high = (np.exp((e - _HLG_C) / _HLG_A) + _HLG_B) / 12.0
    return np.where(e <= 0.5, low, high)


def hlg_gamma(peak_luminance):
    return 1.2 + 0.42 * np.log10(peak_luminance / 1000.0)


def hlg_eotf_rgb(r, g, b, peak_luminance=1000.0):
    """BT.2100 HLG EOTF: applies the inverse OETF per channel, then the
    system OOTF with scene-luminance-dependent gain."""
    rs, gs, bs = (hlg_inverse_oetf(c) for c in (r, g, b))
    ys = 0.2627 * rs + 0.6780 * gs + 0.0593 * bs
    gamma = hlg_gamma(peak_luminance)
    gain = peak_luminance * np.power(np.maximum(ys, 1e-30), gamma - 1.0)
    gain = np.where(ys <= 0.0, 0.0, gain)
    return gain * rs, gain * gs, gain * bs


def bt1886_eotf(signal, peak_luminance=100.0, black_luminance=0.0):
    """BT.1886 reference EOTF with zero default black level (pure 2.4 power)."""
    e = np.clip(np.asarray(signal, dtype=np.float64), 0.0, 1.0)
    return black_luminance + (peak_luminance - black_luminance) * np.power(e, 2.4)


# ---------------------------------------------------------------------------
# Color matrices
# ---------------------------------------------------------------------------

# Luma coefficients for YCbCr <-> R'G'B' (non-constant-luminance).
_KR_KB = {"bt709": (0.2126, 0.0722), "bt2020": (0.2627, 0.0593)}

# Linear RGB -> CIE XYZ (D65 white) for the two supported gamuts.
RGB_TO_XYZ = {
    "bt709": np.array([
        [0.4123907992659595, 0.3575843393838780, 0.1804807884018343],
        [0.2126390058715104, 0.7151686787677559, 0.0721923153607337],
        [0.0193308187155918, 0.1191947797946259, 0.9505321522496608],
    ]),
    "bt2020": np.array([
        [0.6369580483012913, 0.1446169035862083, 0.1688809751641721],
        [0.2627002120112671, 0.6779980715188708, 0.0593017164698620],
        [0.0000000000000000, 0.0280726930490874, 1.0609850577107909],
    ]),
}

# XYZ -> LMS cone responses. Smith-Pokorny style normalization rescaled so
# that the L and M rows sum exactly to [0, 1, 0]: cone luminance x_L + x_M
# then equals CIE Y at every pixel, a property the perceptual encoding and
# the opponent-space transform both assume.
_SP_RAW = np.array([
    [0.15514, 0.54312, -0.03286],
    [-0.15514, 0.45684, 0.03286],
    [0.0, 0.0, 0.01608],
])
_sp_lm_scale = 1.0 / (_SP_RAW[0, 1] + _SP_RAW[1, 1])
XYZ_TO_LMS_DEFAULT = np.array([
    _SP_RAW[0] * _sp_lm_scale,
    _SP_RAW[1] * _sp_lm_scale,
    _SP_RAW[2] / _SP_RAW[2, 2] * 0.016,  # S scale is conventional
])


def ycbcr_to_rgb_matrix(gamut):
    kr, kb = _KR_KB[gamut]
    kg = 1.0 - kr - kb
    return np.array([
        [1.0, 0.0, 2.0 * (1.0 - kr)],
        [1.0, -2.0 * (1.0 - kb) * kb / kg, -2.0 * (1.0 - kr) * kr / kg],
        [1.0, 2.0 * (1.0 - kb), 0.0],
    ])


def normalize_code_values(planes, spec):
    """Integer code values to normalized (Y', Cb, Cr) with Y' in [0, 1] and
    chroma centered on zero, honoring limited/full range."""
    y, cb, cr = (p.astype(np.float64) for p in planes)
    scale = 2 ** (spec.bit_depth - 8)
    if spec.full_range:
        maxval = 2 ** spec.bit_depth - 1
        yn = y / maxval
        cn = 1.0 / maxval
        cbn = cb * cn - (2 ** (spec.bit_depth - 1)) / maxval
        crn = cr * cn - (2 ** (spec.bit_depth - 1)) / maxval
    else:
        yn = (y - 16.0 * scale) / (219.0 * scale)
        cbn = (cb - 128.0 * scale) / (224.0 * scale)
        crn = (cr - 128.0 * scale) / (224.0 * scale)
    return yn, cbn, crn


# ---------------------------------------------------------------------------
# Stream readers
# ---------------------------------------------------------------------------

_Y4M_DEPTH_TAGS = {
    "420": ("420", 8), "420jpeg": ("420", 8), "420mpeg2": ("420", 8),
    "420paldv": ("420", 8), "444": ("444", 8),
    "420p10": ("420", 10), "444p10": ("444", 10),
    "420p12": ("420", 12), "444p12": ("444", 12),
}


def parse_y4m_header(line):
    """Parse a YUV4MPEG2 stream header line into a dict of layout fields."""
    parts = line.decode("ascii", "replace").strip().split(" ")
    if parts[0] != "YUV4MPEG2":
        raise DecodeError("not a y4m stream (bad magic)")
    fields = {}
    for tok in parts[1:]:
        if not tok:
            continue
        key, val = tok[0], tok[1:]
        if key == "W":
            fields["width"] = int(val)
        elif key == "H":
            fields["height"] = int(val)
        elif key == "F":
            num, den = val.split(":")
            fields["frame_rate"] = float(num) / float(den)
        elif key == "C":
            if val not in _Y4M_DEPTH_TAGS:
                raise ConfigError(f"unsupported y4m color tag C{val}")
            sub, depth = _Y4M_DEPTH_TAGS[val]
            fields["chroma_subsampling"] = sub
            fields["bit_depth"] = depth
        # Ip / A / X tags are accepted and ignored.
    return fields


def reconcile_y4m_spec(header_fields, spec):
    """Merge a parsed y4m header into the user spec. Header values win for
    unset spec fields; explicit conflicting values are a config error."""
    merged = {}
    for name in ("width", "height", "bit_depth", "chroma_subsampling",
                 "frame_rate"):
        have = getattr(spec, name)
        got = header_fields.get(name)
        if got is None:
            merged[name] = have
        elif have is None:
            merged[name] = got
        elif name == "frame_rate":
            merged[name] = got
        elif have != got:
            raise ConfigError(
                f"y4m header declares {name}={got} but spec says {have}")
        else:
            merged[name] = got
    return VideoSpec(
        width=merged["width"], height=merged["height"],
        bit_depth=merged["bit_depth"],
        chroma_subsampling=merged["chroma_subsampling"],
        transfer=spec.transfer, gamut=spec.gamut,
        frame_rate=merged["frame_rate"] or spec.frame_rate,
        peak_luminance=spec.peak_luminance, full_range=spec.full_range)


class VideoReader:
    """Frame-random-access reader over .yuv or .y4m byte sources."""

    def __init__(self, source, spec):
        if isinstance(source, (str, os.PathLike)):
            self._stream = open(source, "rb")
            self._name = str(source)
        else:
            self._stream = source
            self._name = "<stream>"
        self._is_y4m = self._sniff_y4m()
        if self._is_y4m:
            self._stream.seek(0)
            header = self._stream.readline()
            self.spec = reconcile_y4m_spec(parse_y4m_header(header), spec)
            self._data_start = len(header)
            self._frame_stride = len(b"FRAME\n") + self.spec.frame_bytes
        else:
            if spec.width is None or spec.height is None:
                raise ConfigError(
                    "raw .yuv input requires explicit width and height")
            self.spec = spec
            self._data_start = 0
            self._frame_stride = self.spec.frame_bytes

    def _sniff_y4m(self):
        self._stream.seek(0)
        return self._stream.read(9) == b"YUV4MPEG2"

    def close(self):
        self._stream.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def num_frames(self):
        self._stream.seek(0, io.SEEK_END)
        total = self._stream.tell() - self._data_start
        return total // self._frame_stride

    def read_frame(self, index):
        return read_frame(self._stream, self.spec, index,
                          data_start=self._data_start, is_y4m=self._is_y4m)


def read_frame(stream, spec, index, data_start=0, is_y4m=False):
    """Read one frame's integer sample planes, chroma replicated to 4:4:4.

    ``stream`` is a seekable binary source of planar YCbCr frames laid out
    per ``spec`` (optionally with y4m framing); frames are indexed from 0.
    """
    if index < 0:
        raise DecodeError("frame index must be nonnegative")
    frame_bytes = spec.frame_bytes
    stride = frame_bytes + (len(b"FRAME\n") if is_y4m else 0)
    offset = data_start + index * stride
    stream.seek(offset)
    if is_y4m:
        marker = stream.readline()
        if not marker.startswith(b"FRAME"):
            raise DecodeError(
                f"missing FRAME marker at byte offset {offset}")
        offset += len(marker)
    raw = stream.read(frame_bytes)
    if len(raw) < frame_bytes:
        raise DecodeError(
            f"truncated stream: wanted {frame_bytes} bytes at offset "
            f"{offset}, got {len(raw)}")

    dtype = np.uint8 if spec.bytes_per_sample == 1 else np.dtype("<u2")
    samples = np.frombuffer(raw, dtype=dtype)
    w, h = spec.width, spec.height
    n = w * h
    y = samples[:n].reshape(h, w)
    if spec.chroma_subsampling == "444":
        cb = samples[n:2 * n].reshape(h, w)
        cr = samples[2 * n:3 * n].reshape(h, w)
    else:
        q = n // 4
        cb = samples[n:n + q].reshape(h // 2, w // 2)
        cr = samples[n + q:n + 2 * q].reshape(h // 2, w // 2)
        # Nearest-neighbor replication to 4:4:4.
        cb = cb.repeat(2, axis=0).repeat(2, axis=1)
        cr = cr.repeat(2, axis=0).repeat(2, axis=1)
    return y.copy(), cb.copy(), cr.copy()


def decode_to_linear(planes, spec, xyz_to_lms=None):
    """Decode integer YCbCr planes into a LinearFrame of LMS responses."""
    if xyz_to_lms is None:
        xyz_to_lms = XYZ_TO_LMS_DEFAULT
    yn, cbn, crn = normalize_code_values(planes, spec)
    m = ycbcr_to_rgb_matrix(spec.gamut)
    rp = m[0, 0] * yn + m[0, 2] * crn
    gp = m[1, 0] * yn + m[1, 1] * cbn + m[1, 2] * crn
    bp = m[2, 0] * yn + m[2, 1] * cbn
    rp, gp, bp = (np.clip(c, 0.0, 1.0) for c in (rp, gp, bp))

    if spec.transfer == "pq":
        r, g, b = (pq_eotf(c) for c in (rp, gp, bp))
        if spec.peak_luminance != 10000.0:
            s = spec.peak_luminance / 10000.0
            r, g, b = r * s, g * s, b * s
    elif spec.transfer == "hlg":
        r, g, b = hlg_eotf_rgb(rp, gp, bp, spec.peak_luminance)
    else:
        r, g, b = (bt1886_eotf(c, spec.peak_luminance) for c in (rp, gp, bp))

    rgb_to_lms = xyz_to_lms @ RGB_TO_XYZ[spec.gamut]
    l = rgb_to_lms[0, 0] * r + rgb_to_lms[0, 1] * g + rgb_to_lms[0, 2] * b
    mm = rgb_to_lms[1, 0] * r + rgb_to_lms[1, 1] * g + rgb_to_lms[1, 2] * b
    s = rgb_to_lms[2, 0] * r + rgb_to_lms[2, 1] * g + rgb_to_lms[2, 2] * b
    return LinearFrame(l_plane=l, m_plane=mm, s_plane=s)


def rescale_test_to_reference(frame, ref_shape):
    """Bilinear-resample a LinearFrame's planes to the reference dimensions.
    Identity (no copy of semantics, new arrays) when shapes already match."""
    if (frame.height, frame.width) == tuple(ref_shape):
        return frame
    return LinearFrame(
        l_plane=resize_bilinear(frame.l_plane, ref_shape),
        m_plane=resize_bilinear(frame.m_plane, ref_shape),
        s_plane=resize_bilinear(frame.s_plane, ref_shape),
    )


# ---------------------------------------------------------------------------
# Writers (fixture/demo support)
# ---------------------------------------------------------------------------

def write_y4m(path, frames, spec):
    """Write integer YCbCr frames (lists of (y, cb, cr) planes at the spec's
    subsampling) as a y4m stream."""
    tag = {("420", 8): "420", ("444", 8): "444",
           ("420", 10): "420p10", ("444", 10): "444p10",
           ("420", 12): "420p12", ("444", 12): "444p12"}[
               (spec.chroma_subsampling, spec.bit_depth)]
    fps_num = int(round(spec.frame_rate * 1000))
    header = (f"YUV4MPEG2 W{spec.width} H{spec.height} "
              f"F{fps_num}:1000 Ip A1:1 C{tag}\n")
    dtype = np.uint8 if spec.bytes_per_sample == 1 else np.dtype("<u2")
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for y, cb, cr in frames:
            fh.write(b"FRAME\n")
            for plane in (y, cb, cr):
                fh.write(np.ascontiguousarray(plane, dtype=dtype).tobytes())


def write_yuv(path, frames, spec):
    dtype = np.uint8 if spec.bytes_per_sample == 1 else np.dtype("<u2")
    with open(path, "wb") as fh:
        for y, cb, cr in frames:
            for plane in (y, cb, cr):
                fh.write(np.ascontiguousarray(plane, dtype=dtype).tobytes())
