"""Frame pipeline: decode -> perceptual encode -> {plain, expanded} variants
-> viewing rescale -> wavelet front-end -> quality maps -> binned assembly.

Frames are pure functions of (frame index, up-to-three prior frames), so
multi-worker runs recompute the short temporal context per task and reduce
in index order; output is identical to a single-worker run.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import nss, wavelet_features as wf
from .binning import (BinConfig, CutGrid, FeatureManifest, SCALES, VARIANTS,
                      cut_measures, reduce_video)
from .binning import assemble_frame as _assemble_frame
from .hdrmax import HdrmaxConfig, hdrmax_frame
from .pucolor import PUCalibration, PUFrame, encode
from .video_io import (FrameBuffer, VideoReader, decode_to_linear,
                       rescale_test_to_reference)
from .wavelet import (CsfWeights, WaveletPyramid, apply_csf, build_moments,
                      haar_analyze, sast_rescale)

TEMPORAL_RING = 4

# Encoded-range span per variant: the expanded variant maps [-1, 1] through
# the double exponential, so its channel range is 2 * (e^4 - 1).
VARIANT_RANGE = {"plain": 1.0, "hdrmax": 2.0 * (np.e ** 4 - 1.0)}


@dataclass
class PipelineConfig:
    viewing_heights: float = 3.0
    hdrmax: HdrmaxConfig = field(default_factory=HdrmaxConfig)
    vif: wf.VifConfig = field(default_factory=wf.VifConfig)
    bins: BinConfig = field(default_factory=BinConfig)


def _weighted_pyramids(frame, csf):
    """CSF-weighted luma and chroma pyramids of one post-rescale frame.

    The chroma plane carries its two opponent components as real/imag; the
    transform is linear and componentwise, so the complex pyramid is built
    from the separately weighted component pyramids.
    """
    luma = apply_csf(haar_analyze(frame.l), csf, "achromatic")
    real_w = apply_csf(haar_analyze(frame.c.real), csf, "red_green")
    imag_w = apply_csf(haar_analyze(frame.c.imag), csf, "blue_yellow")
    chroma = WaveletPyramid(
        approx=[r + 1j * i for r, i in zip(real_w.approx, imag_w.approx)],
        details=[{o: r[o] + 1j * i[o] for o in ("H", "V", "D")}
                 for r, i in zip(real_w.details, imag_w.details)],
        shape=real_w.shape)
    return luma, chroma


@dataclass
class FrameState:
    """Post-rescale encoded planes of one frame, per variant."""

    ref: dict
    test: dict


def compute_frame_state(ref_reader, test_reader, index, calib, cfg):
    """Decode and encode frame ``index`` of both streams into the two
    processing variants at analysis resolution."""
    ref_lin = decode_to_linear(ref_reader.read_frame(index), ref_reader.spec,
                               calib.xyz_to_lms)
    test_lin = decode_to_linear(test_reader.read_frame(index),
                                test_reader.spec, calib.xyz_to_lms)
    test_lin = rescale_test_to_reference(
        test_lin, (ref_lin.height, ref_lin.width))
    ref_pu = encode(ref_lin, calib)
    test_pu = encode(test_lin, calib)
    state = FrameState(ref={}, test={})
    for variant in VARIANTS:
        if variant == "hdrmax":
            rv = hdrmax_frame(ref_pu, cfg.hdrmax)
            tv = hdrmax_frame(test_pu, cfg.hdrmax)
        else:
            rv, tv = ref_pu, test_pu
        state.ref[variant] = sast_rescale(rv, cfg.viewing_heights)
        state.test[variant] = sast_rescale(tv, cfg.viewing_heights)
    return state


def compute_ref_plain_luma(ref_reader, index, calib, cfg):
    """Cheap path for the temporal ring: plain-variant reference luma only."""
    ref_lin = decode_to_linear(ref_reader.read_frame(index), ref_reader.spec,
                               calib.xyz_to_lms)
    ref_pu = encode(ref_lin, calib)
    return sast_rescale(ref_pu, cfg.viewing_heights).l


def frame_features(state, prev_state, ring_lumas, csf, manifest, cfg):
    """Feature values for one frame given its state, the previous frame's
    state (or None on the first frame), and the buffered reference lumas
    (current frame last)."""
    maps_by_variant = {}
    nss_by_variant = {}
    cut_grids = None

    for variant in VARIANTS:
        ref_s, test_s = state.ref[variant], state.test[variant]
        ref_l, ref_c = _weighted_pyramids(ref_s, csf)
        test_l, test_c = _weighted_pyramids(test_s, csf)
        moments = build_moments(ref_l, test_l, ref_c, test_c)

        if prev_state is not None:
            p_ref, p_test = prev_state.ref[variant], prev_state.test[variant]
            d_ref = PUFrame(l=ref_s.l - p_ref.l, c=ref_s.c - p_ref.c)
            d_test = PUFrame(l=test_s.l - p_test.l, c=test_s.c - p_test.c)
            dr_l, dr_c = _weighted_pyramids(d_ref, csf)
            dt_l, dt_c = _weighted_pyramids(d_test, csf)
            diff_moments = build_moments(dr_l, dt_l, dr_c, dt_c)
        else:
            diff_moments = None

        maps = {name: [] for name in
                ("ssim_mu_l", "ssim_sigma_l", "ssim_mu_c", "ssim_sigma_c",
                 "vif_l", "vif_c", "tvif_l", "tvif_c",
                 "srred_l", "srred_c", "trred_l", "trred_c",
                 "dlm", "fosd", "sosd")}
        vrange = VARIANT_RANGE[variant]
        for scale in SCALES:
            for k, v in wf.ssim_maps(moments, scale).items():
                maps[k].append(v)
            for k, v in wf.vif_maps(moments, scale, cfg.vif).items():
                maps[k].append(v)
            for k, v in wf.tvif_maps(diff_moments, scale, cfg.vif).items():
                maps[k].append(v)
            for k, v in wf.rred_maps(moments, scale, cfg.vif).items():
                maps[k].append(v)
            for k, v in wf.rred_maps(diff_moments, scale, cfg.vif,
                                     temporal=True).items():
                maps[k].append(v)
            maps["dlm"].append(wf.dlm_map(ref_l, test_l, scale))
            st = nss.local_stsim(ref_s.l, test_s.l, scale, vrange)
            maps["fosd"].append(st["fosd"])
            maps["sosd"].append(st["sosd"])
        maps_by_variant[variant] = maps
        nss_by_variant[variant] = nss.global_nss(test_s.l, vrange)

        if variant == "plain":
            cut_grids = []
            for scale in SCALES:
                lum, spat, temp = cut_measures(moments, ring_lumas, scale)
                cut_grids.append(CutGrid.from_measures(lum, spat, temp,
                                                       cfg.bins))

    return _assemble_frame(manifest, maps_by_variant, nss_by_variant,
                           cut_grids)


# ---------------------------------------------------------------------------
# Video-level driver
# ---------------------------------------------------------------------------

@dataclass
class VideoJob:
    ref_path: str
    ref_spec: object
    test_path: str
    test_spec: object
    calib: PUCalibration
    csf: CsfWeights
    manifest: FeatureManifest
    cfg: PipelineConfig
    frame_start: int = 0
    frame_stop: int = None


def _frame_range(job):
    with VideoReader(job.ref_path, job.ref_spec) as ref:
        n_ref = ref.num_frames
    with VideoReader(job.test_path, job.test_spec) as test:
        n_test = test.num_frames
    stop = min(n_ref, n_test)
    if job.frame_stop is not None:
        stop = min(stop, job.frame_stop)
    return job.frame_start, stop


def _compute_one_frame(job, index, start):
    """One frame's features, recomputing the short temporal context."""
    with VideoReader(job.ref_path, job.ref_spec) as ref_reader, \
            VideoReader(job.test_path, job.test_spec) as test_reader:
        buffer = FrameBuffer()
        for k in range(max(start, index - (TEMPORAL_RING - 1)), index):
            buffer.push_ref_luma(
                compute_ref_plain_luma(ref_reader, k, job.calib, job.cfg))
        state = compute_frame_state(ref_reader, test_reader, index,
                                    job.calib, job.cfg)
        buffer.push_ref_luma(state.ref["plain"].l)
        if index > start:
            buffer.prev["state"] = compute_frame_state(
                ref_reader, test_reader, index - 1, job.calib, job.cfg)
        return frame_features(state, buffer.prev.get("state"), buffer.frames,
                              job.csf, job.manifest, job.cfg)


def _worker_entry(args):
    job, index, start = args
    return index, _compute_one_frame(job, index, start)


def extract_features(job, workers=1):
    """Per-frame feature vectors plus the per-video reduction, in frame
    order regardless of worker count."""
    start, stop = _frame_range(job)
    if stop <= start:
        raise ValueError("empty frame range")
    indices = list(range(start, stop))

    if workers <= 1:
        per_frame = []
        with VideoReader(job.ref_path, job.ref_spec) as ref_reader, \
                VideoReader(job.test_path, job.test_spec) as test_reader:
            buffer = FrameBuffer()
            for index in indices:
                state = compute_frame_state(ref_reader, test_reader, index,
                                            job.calib, job.cfg)
                buffer.push_ref_luma(state.ref["plain"].l)
                per_frame.append(frame_features(
                    state, buffer.prev.get("state"), buffer.frames, job.csf,
                    job.manifest, job.cfg))
                buffer.prev["state"] = state
    else:
        results = {}
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, feats in pool.map(
                    _worker_entry, [(job, i, start) for i in indices]):
                results[index] = feats
        per_frame = [results[i] for i in indices]

    return per_frame, reduce_video(per_frame)
