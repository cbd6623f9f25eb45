"""Distortion-response experiment: sweep additive code noise on a synthetic
test video and print how the fused features respond.

Usage: python3 scripts/run_noise_sweep.py [levels...]
"""

import os
import sys
import tempfile

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cutfunque.cli import (load_default_calibration, load_default_csf,
                           load_manifest)
from cutfunque.pipeline import PipelineConfig, VideoJob, extract_features
from cutfunque.planes import resize_bilinear
from cutfunque.video_io import VideoSpec, write_y4m

SIZE = (96, 96)
FRAMES = 4
WATCH = ["ssim_sigma_l.plain.mean", "dlm.plain.mean", "vif_l.plain.mean",
         "srred_l.plain.mean", "trred_l.plain.mean", "fosd.plain.mean",
         "sosd.plain.mean", "dlm.hdrmax.worst_spat"]


def synth(path, rng, noise=None, scale=0.0):
    spec = VideoSpec(width=SIZE[1], height=SIZE[0], bit_depth=10,
                     chroma_subsampling="420", transfer="pq", gamut="bt2020")
    base = 64 + 700 * resize_bilinear(rng.uniform(size=(12, 12)), SIZE)
    cb = np.full((SIZE[0] // 2, SIZE[1] // 2), 512.0)
    frames = []
    for t in range(FRAMES):
        y = np.roll(base, 3 * t, axis=1)
        if noise is not None:
            y = y + scale * noise[t]
        frames.append((np.clip(np.round(y), 64, 940).astype(np.uint16),
                       cb.astype(np.uint16), cb.astype(np.uint16)))
    write_y4m(path, frames, spec)


def main(levels):
    rng = np.random.default_rng(404)
    noise = [rng.normal(size=SIZE) for _ in range(FRAMES)]
    work = tempfile.mkdtemp(prefix="noise_sweep_")
    ref = os.path.join(work, "ref.y4m")
    synth(ref, np.random.default_rng(17))
    manifest = load_manifest()
    calib, csf = load_default_calibration(), load_default_csf()
    spec = VideoSpec(transfer="pq", gamut="bt2020")

    print("level  " + "  ".join(f"{n.split('.')[0]:>12}" for n in WATCH))
    for s in levels:
        test = os.path.join(work, f"test_{s}.y4m")
        synth(test, np.random.default_rng(17), noise=noise, scale=s)
        job = VideoJob(ref_path=ref, ref_spec=spec, test_path=test,
                       test_spec=spec, calib=calib, csf=csf,
                       manifest=manifest, cfg=PipelineConfig())
        _, per_video = extract_features(job)
        vals = dict(zip(manifest.names, per_video))
        print(f"{s:5g}  " + "  ".join(f"{vals[n]:12.5f}" for n in WATCH))


if __name__ == "__main__":
    lv = [float(a) for a in sys.argv[1:]] or [0, 10, 20, 40, 80, 160]
    main(lv)
