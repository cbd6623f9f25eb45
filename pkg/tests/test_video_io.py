import io
import math

import numpy as np
import pytest

from cutfunque.errors import ConfigError, DecodeError
from cutfunque.video_io import (FrameBuffer, LinearFrame, VideoReader,
                                VideoSpec, decode_to_linear, read_frame,
                                rescale_test_to_reference, write_y4m,
                                write_yuv)

from oracles import naive_bilinear


# Independent inverse EOTFs, written from the standards, used only as test
# oracles.

def pq_inverse(nits):
    m1, m2 = 2610 / 16384, 2523 / 4096 * 128
    c1, c2, c3 = 3424 / 4096, 2413 / 4096 * 32, 2392 / 4096 * 32
    yp = (nits / 10000.0) ** m1
    return ((c1 + c2 * yp) / (1 + c3 * yp)) ** m2


def hlg_inverse_gray(nits, peak):
    gamma = 1.2 + 0.42 * math.log10(peak / 1000.0)
    e = (nits / peak) ** (1.0 / gamma)
    a, b = 0.17883277, 1 - 4 * 0.17883277
    c = 0.5 - a * math.log(4 * a)
    if e <= 1.0 / 12.0:
        return math.sqrt(3.0 * e)
    return a * math.log(12.0 * e - b) + c


def bt1886_inverse(nits, peak):
    return (nits / peak) ** (1.0 / 2.4)


def gray_planes(code, w=4, h=4, depth=10):
    center = 1 << (depth - 1)
    y = np.full((h, w), code, dtype=np.uint16)
    c = np.full((h, w), center, dtype=np.uint16)
    return y, c, c


class TestReadFrame:
    def make_420_stream(self, num_frames=2, w=4, h=4):
        frames = []
        for t in range(num_frames):
            y = np.arange(w * h, dtype=np.uint8).reshape(h, w) + 10 * t
            cb = np.full((h // 2, w // 2), 100 + t, dtype=np.uint8)
            cr = np.full((h // 2, w // 2), 200 + t, dtype=np.uint8)
            frames.append((y, cb, cr))
        buf = io.BytesIO()
        for y, cb, cr in frames:
            for p in (y, cb, cr):
                buf.write(p.tobytes())
        return buf, frames

    def test_second_frame_chroma_replicated(self):
        buf, frames = self.make_420_stream()
        spec = VideoSpec(width=4, height=4, bit_depth=8,
                         chroma_subsampling="420", transfer="bt1886",
                         gamut="bt709")
        y, cb, cr = read_frame(buf, spec, 1)
        np.testing.assert_array_equal(y, frames[1][0])
        np.testing.assert_array_equal(cb, frames[1][1].repeat(2, 0).repeat(2, 1))
        np.testing.assert_array_equal(cr, frames[1][2].repeat(2, 0).repeat(2, 1))

    def test_truncated_stream_reports_offset(self):
        buf, _ = self.make_420_stream(num_frames=2)
        spec = VideoSpec(width=4, height=4, bit_depth=8,
                         chroma_subsampling="420", transfer="bt1886",
                         gamut="bt709")
        with pytest.raises(DecodeError, match="offset"):
            read_frame(buf, spec, 2)

    def test_y4m_header_depth_conflict(self, tmp_path):
        spec10 = VideoSpec(width=4, height=4, bit_depth=10,
                           chroma_subsampling="420", transfer="pq",
                           gamut="bt2020")
        y = np.full((4, 4), 512, dtype=np.uint16)
        c = np.full((2, 2), 512, dtype=np.uint16)
        path = tmp_path / "clip.y4m"
        write_y4m(path, [(y, c, c)], spec10)
        conflicting = VideoSpec(width=4, height=4, bit_depth=8,
                                chroma_subsampling="420", transfer="pq",
                                gamut="bt2020")
        with pytest.raises(ConfigError, match="bit_depth"):
            VideoReader(path, conflicting)

    def test_y4m_fills_unset_spec_fields(self, tmp_path):
        spec = VideoSpec(width=6, height=4, bit_depth=10,
                         chroma_subsampling="420", transfer="pq",
                         gamut="bt2020", frame_rate=24.0)
        y = np.full((4, 6), 512, dtype=np.uint16)
        c = np.full((2, 3), 512, dtype=np.uint16)
        path = tmp_path / "clip.y4m"
        write_y4m(path, [(y, c, c)], spec)
        reader = VideoReader(path, VideoSpec(transfer="pq", gamut="bt2020"))
        assert (reader.spec.width, reader.spec.height) == (6, 4)
        assert reader.spec.bit_depth == 10
        assert reader.num_frames == 1

    def test_yuv_requires_dimensions(self, tmp_path):
        path = tmp_path / "clip.yuv"
        path.write_bytes(b"\x00" * 24)
        with pytest.raises(ConfigError):
            VideoReader(path, VideoSpec(transfer="bt1886", gamut="bt709",
                                        bit_depth=8))


class TestDecodeToLinear:
    def test_pq_100_nit_white(self):
        # Full-range 10-bit PQ code for 100 nits is 520.
        code = round(pq_inverse(100.0) * 1023)
        assert code == 520
        spec = VideoSpec(width=4, height=4, bit_depth=10,
                         chroma_subsampling="444", transfer="pq",
                         gamut="bt2020", full_range=True)
        frame = decode_to_linear(gray_planes(code), spec)
        lum = frame.luminance
        assert np.allclose(lum, 100.0, rtol=5e-3)

    def test_all_zero_pq_frame(self):
        spec = VideoSpec(width=4, height=4, bit_depth=10,
                         chroma_subsampling="444", transfer="pq",
                         gamut="bt2020", full_range=True)
        y = np.zeros((4, 4), dtype=np.uint16)
        c = np.full((4, 4), 512, dtype=np.uint16)
        frame = decode_to_linear((y, c, c), spec)
        assert np.allclose(frame.luminance, 0.0, atol=1e-12)
        assert np.allclose(frame.s_plane, 0.0, atol=1e-12)

    def test_bt1886_peak_white(self):
        spec = VideoSpec(width=4, height=4, bit_depth=8,
                         chroma_subsampling="444", transfer="bt1886",
                         gamut="bt709", peak_luminance=100.0)
        frame = decode_to_linear(gray_planes(235, depth=8), spec)
        assert np.allclose(frame.luminance, 100.0, rtol=1e-9)

    def test_monotone_in_luma_code(self):
        spec = VideoSpec(width=1, height=1, bit_depth=10,
                         chroma_subsampling="444", transfer="pq",
                         gamut="bt2020")
        lums = []
        for code in range(64, 941, 25):
            frame = decode_to_linear(gray_planes(code, w=1, h=1), spec)
            lums.append(frame.luminance[0, 0])
        assert np.all(np.diff(lums) > 0)

    @pytest.mark.parametrize("transfer,peak", [
        ("pq", 10000.0), ("hlg", 1000.0), ("bt1886", 100.0)])
    def test_roundtrip_against_inverse_oracle(self, transfer, peak):
        inverse = {"pq": lambda n: pq_inverse(n),
                   "hlg": lambda n: hlg_inverse_gray(n, peak),
                   "bt1886": lambda n: bt1886_inverse(n, peak)}[transfer]
        gamut = "bt709" if transfer == "bt1886" else "bt2020"
        spec = VideoSpec(width=1, height=1, bit_depth=12,
                         chroma_subsampling="444", transfer=transfer,
                         gamut=gamut, peak_luminance=peak, full_range=True)
        for nits in np.geomspace(0.01, peak, 25):
            signal = inverse(float(nits))
            code = int(round(signal * 4095))
            # quantization to 12 bits bounds luminance error well under 0.5%
            # except at the very bottom; re-derive the exact nits for the
            # quantized code from the oracle by bisection.
            lo_n, hi_n = 0.0, peak
            for _ in range(80):
                mid = 0.5 * (lo_n + hi_n)
                if inverse(mid) * 4095 < code:
                    lo_n = mid
                else:
                    hi_n = mid
            expect = 0.5 * (lo_n + hi_n)
            frame = decode_to_linear(gray_planes(code, w=1, h=1, depth=12),
                                     spec)
            got = frame.luminance[0, 0]
            assert got == pytest.approx(expect, rel=5e-3, abs=1e-4)

    def test_lms_rows_sum_to_luminance(self):
        from cutfunque.video_io import XYZ_TO_LMS_DEFAULT
        lm = XYZ_TO_LMS_DEFAULT[0] + XYZ_TO_LMS_DEFAULT[1]
        np.testing.assert_allclose(lm, [0.0, 1.0, 0.0], atol=1e-12)


class TestRescale:
    def test_constant_upscale(self):
        c = np.full((540, 960), 3.5)
        frame = LinearFrame(l_plane=c, m_plane=c, s_plane=c)
        out = rescale_test_to_reference(frame, (1080, 1920))
        assert out.l_plane.shape == (1080, 1920)
        np.testing.assert_allclose(out.l_plane, 3.5, atol=1e-12)

    def test_identity_passthrough(self, rng):
        planes = rng.uniform(size=(3, 8, 8))
        frame = LinearFrame(*planes)
        out = rescale_test_to_reference(frame, (8, 8))
        np.testing.assert_array_equal(out.l_plane, planes[0])

    def test_checkerboard_matches_bilinear_oracle(self):
        checker = np.array([[0.0, 1.0], [1.0, 0.0]])
        frame = LinearFrame(l_plane=checker, m_plane=checker,
                            s_plane=checker)
        out = rescale_test_to_reference(frame, (4, 4))
        np.testing.assert_allclose(out.l_plane,
                                   naive_bilinear(checker, (4, 4)),
                                   atol=1e-12)

    def test_random_matches_bilinear_oracle(self, rng):
        plane = rng.uniform(size=(5, 7))
        frame = LinearFrame(l_plane=plane, m_plane=plane, s_plane=plane)
        out = rescale_test_to_reference(frame, (11, 13))
        np.testing.assert_allclose(out.m_plane,
                                   naive_bilinear(plane, (11, 13)),
                                   atol=1e-12)


class TestFrameBuffer:
    def test_ring_capacity_and_order(self):
        buf = FrameBuffer()
        for k in range(6):
            buf.push_ref_luma(np.full((2, 2), float(k)))
            frames = buf.frames
            assert len(frames) == min(k + 1, 4)
            assert frames[-1][0, 0] == float(k)
        assert [f[0, 0] for f in buf.frames] == [2.0, 3.0, 4.0, 5.0]


class TestWriters:
    def test_yuv_roundtrip(self, tmp_path, rng):
        spec = VideoSpec(width=8, height=6, bit_depth=10,
                         chroma_subsampling="420", transfer="pq",
                         gamut="bt2020")
        frames = []
        for _ in range(2):
            frames.append((
                rng.integers(0, 1023, size=(6, 8)).astype(np.uint16),
                rng.integers(0, 1023, size=(3, 4)).astype(np.uint16),
                rng.integers(0, 1023, size=(3, 4)).astype(np.uint16)))
        path = tmp_path / "clip.yuv"
        write_yuv(path, frames, spec)
        reader = VideoReader(path, spec)
        assert reader.num_frames == 2
        y, cb, cr = reader.read_frame(1)
        np.testing.assert_array_equal(y, frames[1][0])
        np.testing.assert_array_equal(cb, frames[1][1].repeat(2, 0).repeat(2, 1))
