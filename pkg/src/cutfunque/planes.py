"""Small shared plane utilities: bilinear resize, symmetric padding, block sums.

All pixel math in this package runs in float64 ("complex128" for chroma), and
all window/block reductions assume row-major (height, width) planes.
"""

import numpy as np


def resize_bilinear(plane, out_shape):
    """Bilinear resample to ``out_shape`` = (height, width).

    Uses half-pixel-center sampling (the common image-resize convention):
    source coordinate = (dst + 0.5) * src/dst - 0.5, clamped to the frame.
    Complex planes are resampled componentwise.
    """
    if np.iscomplexobj(plane):
        return (resize_bilinear(plane.real, out_shape)
                + 1j * resize_bilinear(plane.imag, out_shape))
    src_h, src_w = plane.shape
    out_h, out_w = out_shape
    if (src_h, src_w) == (out_h, out_w):
        return plane.copy()
    plane = np.asarray(plane, dtype=np.float64)

    ys = (np.arange(out_h) + 0.5) * (src_h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (src_w / out_w) - 0.5
    ys = np.clip(ys, 0.0, src_h - 1.0)
    xs = np.clip(xs, 0.0, src_w - 1.0)

    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, src_h - 1)
    x1 = np.minimum(x0 + 1, src_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]

    top = plane[y0][:, x0] * (1 - wx) + plane[y0][:, x1] * wx
    bot = plane[y1][:, x0] * (1 - wx) + plane[y1][:, x1] * wx
    return top * (1 - wy) + bot * wy


def pad_symmetric_to_multiple(plane, multiple):
    """Pad on the bottom/right with edge-inclusive mirroring so that both
    dimensions become multiples of ``multiple``."""
    h, w = plane.shape
    pad_h = (-h) % multiple
    pad_w = (-w) % multiple
    if pad_h == 0 and pad_w == 0:
        return plane
    return np.pad(plane, ((0, pad_h), (0, pad_w)), mode="symmetric")


def block_sum(plane, block):
    """Sum over non-overlapping ``block`` x ``block`` windows.

    Requires dims to be multiples of ``block``.
    """
    h, w = plane.shape
    return plane.reshape(h // block, block, w // block, block).sum(axis=(1, 3))


def block_mean(plane, block):
    return block_sum(plane, block) / (block * block)


def cut_reduce_mean(plane, cut):
    """Mean over non-overlapping ``cut`` x ``cut`` windows, allowing partial
    windows at the bottom/right edges (mean over available samples)."""
    h, w = plane.shape
    gh, gw = -(-h // cut), -(-w // cut)
    out = np.empty((gh, gw), dtype=plane.dtype)
    for gi in range(gh):
        for gj in range(gw):
            out[gi, gj] = plane[gi * cut:(gi + 1) * cut,
                                gj * cut:(gj + 1) * cut].mean()
    return out


def cut_reduce_sum(plane, cut):
    """Sum over non-overlapping ``cut`` x ``cut`` windows with edge partials."""
    h, w = plane.shape
    gh, gw = -(-h // cut), -(-w // cut)
    out = np.empty((gh, gw), dtype=plane.dtype)
    for gi in range(gh):
        for gj in range(gw):
            out[gi, gj] = plane[gi * cut:(gi + 1) * cut,
                                gj * cut:(gj + 1) * cut].sum()
    return out
