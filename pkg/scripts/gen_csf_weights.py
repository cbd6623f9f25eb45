"""Regenerate the packaged subband contrast-sensitivity weight fixture.

Weights follow a log-parabola threshold model per orientation and channel
class, evaluated at the band frequencies of a 32 pixel/degree display (the
canonical viewing geometry after the half-resolution rescale). Each weight
is the reciprocal threshold relative to the deepest achromatic
approximation band, which is pinned at 1 so luma means keep the encoded
range.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cutfunque.wavelet import CHANNEL_CLASSES, LEVELS, ORIENTATIONS, CsfWeights

PIX_PER_DEG = 32.0
ORIENT_SHIFT = {"A": 1.501, "H": 1.0, "V": 1.0, "D": 0.534}
# (base threshold, log-parabola width, peak frequency in cycles/degree)
CLASS_PARAMS = {
    "achromatic": (0.495, 0.466, 0.401),
    "red_green": (0.70, 0.55, 0.20),
    "blue_yellow": (1.00, 0.60, 0.10),
}


def threshold(level, orientation, channel_class):
    a, k, f0 = CLASS_PARAMS[channel_class]
    freq = PIX_PER_DEG * 2.0 ** (-level)
    g = ORIENT_SHIFT[orientation]
    return a * 10.0 ** (k * (np.log10(freq) - np.log10(g * f0)) ** 2)


def main(out_path):
    ref = threshold(LEVELS, "A", "achromatic")
    table = {}
    for lv in range(1, LEVELS + 1):
        for o in ORIENTATIONS:
            for c in CHANNEL_CLASSES:
                table[(lv, o, c)] = float(ref / threshold(lv, o, c))
    CsfWeights(table=table).to_json(out_path)
    print(f"wrote {len(table)} weights to {out_path}")


if __name__ == "__main__":
    default = os.path.join(os.path.dirname(__file__), "..", "src",
                           "cutfunque", "data", "csf_watson.json")
    main(sys.argv[1] if len(sys.argv) > 1 else default)
