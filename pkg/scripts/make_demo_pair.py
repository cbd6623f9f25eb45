"""Write a small reference/test video pair for demos and integration tests.

The reference is smooth drifting content; the test adds fixed-pattern code
noise, standing in for a tone-mapped, compressed rendition.

Usage: python3 scripts/make_demo_pair.py OUT_DIR [frames] [size]
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cutfunque.planes import resize_bilinear
from cutfunque.video_io import VideoSpec, write_y4m


def smooth(rng, shape, coarse):
    return resize_bilinear(rng.uniform(size=(coarse, coarse)), shape)


def main(out_dir, num_frames=3, size=64):
    os.makedirs(out_dir, exist_ok=True)
    rng = np.random.default_rng(2024)
    spec = VideoSpec(width=size, height=size, bit_depth=10,
                     chroma_subsampling="420", transfer="pq", gamut="bt2020",
                     frame_rate=30.0)
    base_y = 64 + 700 * smooth(rng, (size, size), 8)
    base_cb = 512 + 100 * (smooth(rng, (size // 2, size // 2), 4) - 0.5)
    base_cr = 512 + 100 * (smooth(rng, (size // 2, size // 2), 4) - 0.5)
    noise = [rng.normal(size=(size, size)) for _ in range(num_frames)]

    def frames(noisy):
        out = []
        for t in range(num_frames):
            y = np.roll(base_y, 3 * t, axis=1)
            if noisy:
                y = y + 40.0 * noise[t]
            out.append((
                np.clip(np.round(y), 64, 940).astype(np.uint16),
                np.clip(np.round(base_cb), 64, 960).astype(np.uint16),
                np.clip(np.round(base_cr), 64, 960).astype(np.uint16)))
        return out

    ref = os.path.join(out_dir, "ref.y4m")
    test = os.path.join(out_dir, "test.y4m")
    write_y4m(ref, frames(noisy=False), spec)
    write_y4m(test, frames(noisy=True), spec)
    print(ref)
    print(test)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "demo_pair"
    nf = int(sys.argv[2]) if len(sys.argv) > 2 else 3
    sz = int(sys.argv[3]) if len(sys.argv) > 3 else 64
    main(out, nf, sz)
