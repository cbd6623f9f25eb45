"""Independent brute-force oracles used by the unit and acceptance tests.

Everything here is written directly from the defining formulas with plain
loops or quadrature, deliberately sharing no code with the fast paths it
checks.
"""

import math
import warnings

import numpy as np
from scipy import integrate
from scipy.integrate import IntegrationWarning


# ---------------------------------------------------------------------------
# Sliding-window min/max (naive O(n w^2))
# ---------------------------------------------------------------------------

def naive_sliding_minmax(plane, window):
    r = window // 2
    padded = np.pad(plane, r, mode="symmetric")
    h, w = plane.shape
    lo = np.empty_like(plane, dtype=np.float64)
    hi = np.empty_like(plane, dtype=np.float64)
    for i in range(h):
        for j in range(w):
            patch = padded[i:i + window, j:j + window]
            lo[i, j] = patch.min()
            hi[i, j] = patch.max()
    return lo, hi


# ---------------------------------------------------------------------------
# Multi-scale moments from the defining triple sums
# ---------------------------------------------------------------------------

def naive_moments(x_pyr, y_pyr, scale, complex_mode):
    """Window moments at one scale straight from the defining triple sum:
    for each window, sum detail-coefficient energies over every level's
    covering block and the three orientations."""
    ch, cw = x_pyr.level_shape(scale)
    mu_x = x_pyr.approx[scale - 1][:ch, :cw] * 2.0 ** (-scale)
    mu_y = y_pyr.approx[scale - 1][:ch, :cw] * 2.0 ** (-scale)
    var_x = np.zeros((ch, cw))
    var_y = np.zeros((ch, cw))
    cov = np.zeros((ch, cw), dtype=complex if complex_mode else float)
    for i in range(ch):
        for j in range(cw):
            acc_x = acc_y = 0.0
            acc_xy = 0.0 + 0.0j if complex_mode else 0.0
            for k in range(1, scale + 1):
                blk = 1 << (scale - k)
                sl = np.s_[i * blk:(i + 1) * blk, j * blk:(j + 1) * blk]
                for o in ("H", "V", "D"):
                    xc = x_pyr.details[k - 1][o][sl]
                    yc = y_pyr.details[k - 1][o][sl]
                    acc_x += float(np.sum((xc * np.conj(xc)).real))
                    acc_y += float(np.sum((yc * np.conj(yc)).real))
                    if complex_mode:
                        acc_xy += complex(np.sum(xc * np.conj(yc)))
                    else:
                        acc_xy += float(np.sum(xc * yc))
            scale_f = 4.0 ** (-scale)
            var_x[i, j] = scale_f * acc_x
            var_y[i, j] = scale_f * acc_y
            cov[i, j] = scale_f * acc_xy
    return mu_x, mu_y, var_x, var_y, cov


# ---------------------------------------------------------------------------
# Formula-literal wavelet feature maps (window level, then cut means)
# ---------------------------------------------------------------------------

def cut_mean(values, cells=4):
    h, w = values.shape
    gh, gw = -(-h // cells), -(-w // cells)
    out = np.empty((gh, gw))
    for gi in range(gh):
        for gj in range(gw):
            out[gi, gj] = values[gi * cells:(gi + 1) * cells,
                                 gj * cells:(gj + 1) * cells].mean()
    return out


def naive_ssim_maps(mu_x, mu_y, var_x, var_y, cov, c1, c2, chroma):
    h, w = var_x.shape
    mu_map = np.empty((h, w))
    sig_map = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            if chroma:
                mu_map[i, j] = ((2 * abs(mu_x[i, j] * mu_y[i, j]) + c1)
                                / (abs(mu_x[i, j] ** 2)
                                   + abs(mu_y[i, j] ** 2) + c1))
                sig_map[i, j] = ((2 * abs(cov[i, j]) + c2)
                                 / (var_x[i, j] + var_y[i, j] + c2))
            else:
                mu_map[i, j] = ((2 * mu_x[i, j] * mu_y[i, j] + c1)
                                / (mu_x[i, j] ** 2 + mu_y[i, j] ** 2 + c1))
                sig_map[i, j] = ((2 * cov[i, j] + c2)
                                 / (var_x[i, j] + var_y[i, j] + c2))
    return cut_mean(mu_map), cut_mean(sig_map)


def naive_vif_map(var_x, var_y, cov, sigma_nsq, chroma):
    h, w = var_x.shape
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            vx, vy = var_x[i, j], var_y[i, j]
            if vx < 1e-12:
                out[i, j] = 1.0
                continue
            c = cov[i, j]
            csq = (c * np.conj(c)).real if chroma else c * c
            g_cov = csq / vx
            sig_v = max(vy - g_cov, 0.0)
            mi_test = math.log(1.0 + g_cov / (sig_v + sigma_nsq))
            mi_ref = math.log(1.0 + vx / sigma_nsq)
            out[i, j] = mi_test / mi_ref
    return cut_mean(out)


def naive_rred_map(var_a, var_b, sigma_nsq):
    h, w = var_a.shape
    out = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            ha = (math.log(1 + var_a[i, j])
                  * math.log(2 * math.pi * math.e * (var_a[i, j] + sigma_nsq)))
            hb = (math.log(1 + var_b[i, j])
                  * math.log(2 * math.pi * math.e * (var_b[i, j] + sigma_nsq)))
            out[i, j] = abs(ha - hb)
    return cut_mean(out)


def naive_dlm_map(ref_pyr, test_pyr, scale):
    ch, cw = ref_pyr.level_shape(scale)
    xs = {o: ref_pyr.details[scale - 1][o][:ch, :cw] for o in "HVD"}
    ys = {o: test_pyr.details[scale - 1][o][:ch, :cw] for o in "HVD"}

    restored = {o: np.zeros((ch, cw)) for o in "HVD"}
    adds = {o: np.zeros((ch, cw)) for o in "HVD"}
    for i in range(ch):
        for j in range(cw):
            px = math.atan2(xs["V"][i, j], xs["H"][i, j])
            py = math.atan2(ys["V"][i, j], ys["H"][i, j])
            d = abs(math.atan2(math.sin(px - py), math.cos(px - py)))
            enh = d < math.radians(1.0)
            for o in "HVD":
                x, y = xs[o][i, j], ys[o][i, j]
                gamma = 0.0 if x == 0.0 else y / x
                if not enh:
                    gamma = min(max(gamma, 0.0), 1.0)
                restored[o][i, j] = gamma * x
                adds[o][i, j] = abs(y - gamma * x)

    mask = np.zeros((ch, cw))
    for i in range(ch):
        for j in range(cw):
            acc = 0.0
            for o in "HVD":
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        m, n = i + di, j + dj
                        if 0 <= m < ch and 0 <= n < cw:
                            wgt = 2 / 30 if (di == 0 and dj == 0) else 1 / 30
                            acc += wgt * adds[o][m, n]
            mask[i, j] = acc

    gh, gw = -(-ch // 4), -(-cw // 4)
    out = np.empty((gh, gw))
    for gi in range(gh):
        for gj in range(gw):
            num = den = 0.0
            for i in range(gi * 4, min((gi + 1) * 4, ch)):
                for j in range(gj * 4, min((gj + 1) * 4, cw)):
                    for o in "HVD":
                        r = max(abs(restored[o][i, j]) - mask[i, j], 0.0)
                        num += r ** 3
                        den += abs(xs[o][i, j]) ** 3
            out[gi, gj] = 1.0 if den <= 0.0 else (num ** (1 / 3)) / (den ** (1 / 3))
    return out


# ---------------------------------------------------------------------------
# MSCN (naive windowed sums)
# ---------------------------------------------------------------------------

def naive_mscn(plane, value_range=1.0, taps=7, sigma=7.0 / 6.0):
    r = taps // 2
    ax = np.arange(-r, r + 1, dtype=float)
    k1 = np.exp(-0.5 * (ax / sigma) ** 2)
    k1 /= k1.sum()
    kern = np.outer(k1, k1)
    eps = 1e-3 * value_range
    padded = np.pad(plane, r, mode="symmetric")
    h, w = plane.shape
    mu = np.empty((h, w))
    sig = np.empty((h, w))
    for i in range(h):
        for j in range(w):
            patch = padded[i:i + taps, j:j + taps]
            m = float((patch * kern).sum())
            mu[i, j] = m
            sig[i, j] = math.sqrt(max(float((patch * patch * kern).sum()) - m * m,
                                      0.0))
    return (plane - mu) / (sig + eps), sig


# ---------------------------------------------------------------------------
# KL divergence by quadrature (substituted to a Gamma-weighted integral)
# ---------------------------------------------------------------------------

def _ggd_logpdf(x, alpha, b):
    return (math.log(alpha) - math.log(2 * b) - math.lgamma(1 / alpha)
            - (abs(x) / b) ** alpha)


def _aggd_logpdf(x, alpha, b_l, b_r):
    b = b_l if x < 0 else b_r
    return (math.log(alpha) - math.log(b_l + b_r) - math.lgamma(1 / alpha)
            - (abs(x) / b) ** alpha)


def quad_kl_ggd(a1, b1, a2, b2):
    """KL(GGD1 || GGD2) by quadrature. Substituting |x| = b1 * t^(1/a1)
    turns each half-line into a Gamma(1/a1)-weighted integral, which is
    numerically tame for any shape in the clamp box."""
    norm = 1.0 / (2.0 * math.gamma(1.0 / a1))

    def integrand(t):
        x = b1 * t ** (1.0 / a1)
        ratio = _ggd_logpdf(x, a1, b1) - _ggd_logpdf(x, a2, b2)
        return 2.0 * norm * t ** (1.0 / a1 - 1.0) * math.exp(-t) * ratio

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-12,
                                epsrel=1e-12, limit=400)
    return val


def quad_kl_aggd(a1, bl1, br1, a2, bl2, br2):
    total = 0.0
    for sign, b_side in ((-1.0, bl1), (1.0, br1)):
        weight = b_side / ((bl1 + br1) * math.gamma(1.0 / a1))

        def integrand(t, sign=sign, b_side=b_side, weight=weight):
            x = sign * b_side * t ** (1.0 / a1)
            ratio = (_aggd_logpdf(x, a1, bl1, br1)
                     - _aggd_logpdf(x, a2, bl2, br2))
            return weight * t ** (1.0 / a1 - 1.0) * math.exp(-t) * ratio

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-12,
                                    epsrel=1e-12, limit=400)
        total += val
    return total


# ---------------------------------------------------------------------------
# Synthetic GGD/AGGD samplers
# ---------------------------------------------------------------------------

def sample_ggd(rng, alpha, b, n):
    g = rng.gamma(shape=1.0 / alpha, scale=1.0, size=n)
    return b * g ** (1.0 / alpha) * rng.choice([-1.0, 1.0], size=n)


def sample_aggd(rng, alpha, b_l, b_r, n):
    g = rng.gamma(shape=1.0 / alpha, scale=1.0, size=n)
    mag = g ** (1.0 / alpha)
    left = rng.random(n) < b_l / (b_l + b_r)
    return np.where(left, -b_l * mag, b_r * mag)


# ---------------------------------------------------------------------------
# Bilinear resize at explicit coordinates
# ---------------------------------------------------------------------------

def naive_bilinear(plane, out_shape):
    src_h, src_w = plane.shape
    out = np.empty(out_shape)
    for i in range(out_shape[0]):
        for j in range(out_shape[1]):
            sy = min(max((i + 0.5) * src_h / out_shape[0] - 0.5, 0.0), src_h - 1.0)
            sx = min(max((j + 0.5) * src_w / out_shape[1] - 0.5, 0.0), src_w - 1.0)
            y0, x0 = int(math.floor(sy)), int(math.floor(sx))
            y1, x1 = min(y0 + 1, src_h - 1), min(x0 + 1, src_w - 1)
            fy, fx = sy - y0, sx - x0
            out[i, j] = (plane[y0, x0] * (1 - fy) * (1 - fx)
                         + plane[y0, x1] * (1 - fy) * fx
                         + plane[y1, x0] * fy * (1 - fx)
                         + plane[y1, x1] * fy * fx)
    return out
