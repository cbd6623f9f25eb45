"""Wavelet-domain quality maps from the shared moment pyramid.

Every map is computed per moment window with the printed per-window formulas,
then reduced to the cut grid (4 x 4 windows per cut at every scale, edge
cuts partial) so the binned aggregation sees one value per cut. Temporal
variants use moments of successive-frame differences and are absent on the
first frame.
"""

from dataclasses import dataclass

import numpy as np

from .planes import cut_reduce_mean, cut_reduce_sum

WINDOWS_PER_CUT = 4  # cut side in moment windows, all scales

C1_DEFAULT = (0.01 * 1.0) ** 2
C2_DEFAULT = (0.03 * 1.0) ** 2
VAR_FLOOR = 1e-12
ANGLE_GATE_RAD = np.deg2rad(1.0)


@dataclass
class VifConfig:
    """Distortion-channel noise variance, also the entropy floor in RRED."""

    sigma_nsq: float = 0.1

    def __post_init__(self):
        assert self.sigma_nsq > 0


def _to_cut(map_per_window):
    return cut_reduce_mean(map_per_window, WINDOWS_PER_CUT)


# ---------------------------------------------------------------------------
# SSIM
# ---------------------------------------------------------------------------

def ssim_maps(moments, scale, c1=C1_DEFAULT, c2=C2_DEFAULT):
    """Mean and contrast-structure similarity for luma and chroma at one
    scale, reduced to the cut grid. Keys: ssim_mu_l, ssim_sigma_l,
    ssim_mu_c, ssim_sigma_c."""
    lm = moments.luma
    cm = moments.chroma
    i = scale - 1

    mu_x, mu_y = lm.mu_x[i], lm.mu_y[i]
    mu_map = (2.0 * mu_x * mu_y + c1) / (mu_x ** 2 + mu_y ** 2 + c1)
    sig_map = ((2.0 * lm.cov_xy[i] + c2)
               / (lm.var_x[i] + lm.var_y[i] + c2))

    cmu_x, cmu_y = cm.mu_x[i], cm.mu_y[i]
    cmu_map = ((2.0 * np.abs(cmu_x * cmu_y) + c1)
               / (np.abs(cmu_x ** 2) + np.abs(cmu_y ** 2) + c1))
    csig_map = ((2.0 * np.abs(cm.cov_xy[i]) + c2)
                / (cm.var_x[i] + cm.var_y[i] + c2))

    return {
        "ssim_mu_l": _to_cut(mu_map),
        "ssim_sigma_l": _to_cut(sig_map),
        "ssim_mu_c": _to_cut(cmu_map),
        "ssim_sigma_c": _to_cut(csig_map),
    }


# ---------------------------------------------------------------------------
# VIF
# ---------------------------------------------------------------------------

def _vif_from_moments(var_x, var_y, cov_xy, sigma_nsq, complex_mode):
    """Per-window information ratio under the gain-plus-noise channel.

    Windows carrying no reference information (both mutual-information
    estimates zero) score 1: nothing was there to lose.
    """
    no_info = var_x < VAR_FLOOR
    safe_var_x = np.maximum(var_x, VAR_FLOOR)
    if complex_mode:
        cov_sq = (cov_xy * np.conj(cov_xy)).real
    else:
        cov_sq = cov_xy ** 2
    g_cov = np.where(no_info, 0.0, cov_sq / safe_var_x)
    sigma_vsq = np.maximum(var_y - g_cov, 0.0)
    mi_test = np.log(1.0 + g_cov / (sigma_vsq + sigma_nsq))
    mi_ref = np.log(1.0 + var_x / sigma_nsq)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = mi_test / np.where(no_info, 1.0, mi_ref)
    return np.where(no_info, 1.0, ratio)


def vif_maps(moments, scale, cfg=None):
    """Spatial VIF for luma and chroma at one scale (cut grid)."""
    cfg = cfg or VifConfig()
    i = scale - 1
    lm, cm = moments.luma, moments.chroma
    vif_l = _vif_from_moments(lm.var_x[i], lm.var_y[i], lm.cov_xy[i],
                              cfg.sigma_nsq, complex_mode=False)
    vif_c = _vif_from_moments(cm.var_x[i], cm.var_y[i], cm.cov_xy[i],
                              cfg.sigma_nsq, complex_mode=True)
    return {"vif_l": _to_cut(vif_l), "vif_c": _to_cut(vif_c)}


def tvif_maps(diff_moments, scale, cfg=None):
    """Temporal VIF on frame-difference moments; None when no previous
    frame exists (the consumer skips absent maps)."""
    if diff_moments is None:
        return {"tvif_l": None, "tvif_c": None}
    maps = vif_maps(diff_moments, scale, cfg)
    return {"tvif_l": maps["vif_l"], "tvif_c": maps["vif_c"]}


# ---------------------------------------------------------------------------
# RRED
# ---------------------------------------------------------------------------

def _scaled_entropy(var, sigma_nsq):
    return np.log1p(var) * np.log(2.0 * np.pi * np.e * (var + sigma_nsq))


def rred_maps(moments, scale, cfg=None, temporal=False):
    """Absolute differences of scaled local entropies, luma and chroma.

    Uses single-signal variances only. With ``temporal`` the provided
    moments must already come from frame differences; None moments mark the
    map absent (first frame)."""
    cfg = cfg or VifConfig()
    prefix = "t" if temporal else "s"
    if moments is None:
        return {f"{prefix}rred_l": None, f"{prefix}rred_c": None}
    i = scale - 1
    out = {}
    for ch, name in ((moments.luma, f"{prefix}rred_l"),
                     (moments.chroma, f"{prefix}rred_c")):
        h_ref = _scaled_entropy(ch.var_x[i], cfg.sigma_nsq)
        h_test = _scaled_entropy(ch.var_y[i], cfg.sigma_nsq)
        out[name] = _to_cut(np.abs(h_ref - h_test))
    return out


# ---------------------------------------------------------------------------
# DLM
# ---------------------------------------------------------------------------

def _masking_threshold(abs_add):
    """3x3 weighted sum of additive-impairment magnitudes, summed over the
    three orientations; center weight 2/30, neighbors 1/30, positions
    outside the frame contribute zero."""
    total = None
    for a in abs_add:
        padded = np.pad(a, 1, mode="constant")
        acc = np.zeros_like(a)
        for di in range(3):
            for dj in range(3):
                w = 2.0 / 30.0 if (di == 1 and dj == 1) else 1.0 / 30.0
                acc += w * padded[di:di + a.shape[0], dj:dj + a.shape[1]]
        total = acc if total is None else total + acc
    return total


def dlm_map(ref_pyr, test_pyr, scale):
    """Detail-loss ratio per cut from the CSF-weighted luma detail bands.

    The gain estimate Y/X keeps values outside [0, 1] only where the local
    gradient orientations agree within one degree (contrast enhancement);
    restored magnitudes are masked by the local additive impairments, and
    the per-cut score is the cube-root ratio of pooled restored to
    reference detail energy. Cuts with no reference detail score 1.
    """
    ch, cw = ref_pyr.level_shape(scale)
    xs = {o: ref_pyr.details[scale - 1][o][:ch, :cw] for o in ("H", "V", "D")}
    ys = {o: test_pyr.details[scale - 1][o][:ch, :cw] for o in ("H", "V", "D")}

    psi_x = np.arctan2(xs["V"], xs["H"])
    psi_y = np.arctan2(ys["V"], ys["H"])
    dpsi = np.abs(np.arctan2(np.sin(psi_x - psi_y), np.cos(psi_x - psi_y)))
    enhancement = dpsi < ANGLE_GATE_RAD

    restored_abs, add_abs = [], []
    for o in ("H", "V", "D"):
        x, y = xs[o], ys[o]
        with np.errstate(invalid="ignore", divide="ignore"):
            gamma = np.where(x != 0.0, y / np.where(x != 0.0, x, 1.0), 0.0)
        gamma = np.where(enhancement, gamma, np.clip(gamma, 0.0, 1.0))
        restored = gamma * x
        add_abs.append(np.abs(y - restored))
        restored_abs.append(np.abs(restored))

    mask = _masking_threshold(add_abs)
    num = None
    den = None
    for r_abs, o in zip(restored_abs, ("H", "V", "D")):
        r_masked = np.maximum(r_abs - mask, 0.0)
        n_c = cut_reduce_sum(r_masked ** 3, WINDOWS_PER_CUT)
        d_c = cut_reduce_sum(np.abs(xs[o]) ** 3, WINDOWS_PER_CUT)
        num = n_c if num is None else num + n_c
        den = d_c if den is None else den + d_c
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.cbrt(num) / np.cbrt(den)
    return np.where(den <= 0.0, 1.0, ratio)
