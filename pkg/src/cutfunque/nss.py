"""Natural-scene-statistics features.

Mean-subtracted contrast normalization, generalized-Gaussian fits to the
coefficient (and paired-product) distributions via moment matching, and
closed-form KL divergences between reference and test fits, both globally
and per cut. All per-cut fitting is vectorized over the cut grid.
"""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d
from scipy.special import gammaln

from .errors import FitError
from .planes import cut_reduce_sum

ALPHA_MIN, ALPHA_MAX = 0.05, 10.0
SCALE_FLOOR = 1e-6
MIN_FIT_SAMPLES = 64
MSCN_WINDOW = 7
MSCN_SIGMA = 7.0 / 6.0
DIRECTIONS = ("H", "V", "D1", "D2")


# ---------------------------------------------------------------------------
# MSCN transform
# ---------------------------------------------------------------------------

def _gauss_kernel(taps=MSCN_WINDOW, sigma=MSCN_SIGMA):
    r = taps // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()

_KERNEL = _gauss_kernel()


def _gauss_filter(plane):
    out = correlate1d(plane, _KERNEL, axis=0, mode="reflect")
    return correlate1d(out, _KERNEL, axis=1, mode="reflect")


@dataclass
class MscnPlanes:
    mscn: np.ndarray
    sigma: np.ndarray
    sigma_mscn: np.ndarray
    products: dict


def _divisive_normalize(plane, eps):
    mu = _gauss_filter(plane)
    sigma = np.sqrt(np.maximum(_gauss_filter(plane * plane) - mu * mu, 0.0))
    return (plane - mu) / (sigma + eps), sigma


def mscn(plane, value_range=1.0):
    """MSCN coefficients, the local-deviation field normalized the same way
    (sigma-MSCN), and the four directional paired products."""
    plane = np.asarray(plane, dtype=np.float64)
    eps = 1e-3 * value_range
    coeffs, sigma = _divisive_normalize(plane, eps)
    sigma_coeffs, _ = _divisive_normalize(sigma, eps)
    products = {
        "H": coeffs[:, :-1] * coeffs[:, 1:],
        "V": coeffs[:-1, :] * coeffs[1:, :],
        "D1": coeffs[:-1, :-1] * coeffs[1:, 1:],
        "D2": coeffs[:-1, 1:] * coeffs[1:, :-1],
    }
    return MscnPlanes(mscn=coeffs, sigma=sigma, sigma_mscn=sigma_coeffs,
                      products=products)


# ---------------------------------------------------------------------------
# Moment-matching fits
# ---------------------------------------------------------------------------

@dataclass
class GGDParams:
    alpha: float
    b: float


@dataclass
class AGGDParams:
    alpha: float
    b_l: float
    b_r: float


def _ggd_moment_ratio(alpha):
    """rho(alpha) = Gamma(1/a) Gamma(3/a) / Gamma(2/a)^2, strictly
    decreasing from +inf toward 4/3."""
    a = np.asarray(alpha, dtype=np.float64)
    return np.exp(gammaln(1.0 / a) + gammaln(3.0 / a) - 2.0 * gammaln(2.0 / a))


def _solve_alpha(target, increasing, iterations=70):
    """Vectorized bisection of a monotone moment ratio on the alpha clamp
    box; out-of-range targets clamp to the nearest bound."""
    target = np.asarray(target, dtype=np.float64)
    lo = np.full_like(target, ALPHA_MIN)
    hi = np.full_like(target, ALPHA_MAX)
    if increasing:
        f = lambda a: 1.0 / _ggd_moment_ratio(a)
    else:
        f = _ggd_moment_ratio
    f_lo = f(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if increasing:
            go_right = f_mid < target
        else:
            go_right = f_mid > target
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    return 0.5 * (lo + hi)


def ggd_fit_from_moments(m_abs, m_sq):
    """(alpha, b) arrays from E[|x|] and E[x^2] arrays."""
    m_abs = np.maximum(np.asarray(m_abs, dtype=np.float64), 1e-30)
    m_sq = np.maximum(np.asarray(m_sq, dtype=np.float64), 1e-60)
    r = m_sq / (m_abs * m_abs)
    alpha = _solve_alpha(r, increasing=False)
    b = np.sqrt(m_sq * np.exp(gammaln(1.0 / alpha) - gammaln(3.0 / alpha)))
    return alpha, np.maximum(b, SCALE_FLOOR)


def fit_ggd(samples):
    """Symmetric generalized-Gaussian fit by moment matching."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < MIN_FIT_SAMPLES:
        raise FitError(f"need at least {MIN_FIT_SAMPLES} samples")
    m_sq = float(np.mean(samples ** 2))
    if m_sq < SCALE_FLOOR ** 2:
        raise FitError("degenerate samples (all near zero)")
    alpha, b = ggd_fit_from_moments(np.mean(np.abs(samples)), m_sq)
    return GGDParams(alpha=float(alpha), b=float(b))


def aggd_fit_from_moments(s2_neg, n_neg, s2_pos, n_pos, m_abs, m_sq):
    """(alpha, b_l, b_r) arrays from one-sided second moments (sums and
    counts) and the unconditional first/second absolute moments."""
    sigma_l = np.sqrt(s2_neg / np.maximum(n_neg, 1.0))
    sigma_r = np.sqrt(s2_pos / np.maximum(n_pos, 1.0))
    sigma_l = np.maximum(sigma_l, SCALE_FLOOR)
    sigma_r = np.maximum(sigma_r, SCALE_FLOOR)
    gamma_hat = sigma_l / sigma_r
    m_abs = np.maximum(np.asarray(m_abs, dtype=np.float64), 1e-30)
    m_sq = np.maximum(np.asarray(m_sq, dtype=np.float64), 1e-60)
    r_hat = (m_abs * m_abs) / m_sq
    r_norm = (r_hat * (gamma_hat ** 3 + 1.0) * (gamma_hat + 1.0)
              / (gamma_hat ** 2 + 1.0) ** 2)
    alpha = _solve_alpha(r_norm, increasing=True)
    conv = np.exp(0.5 * (gammaln(1.0 / alpha) - gammaln(3.0 / alpha)))
    # A side with no samples sits exactly on the scale floor.
    b_l = np.where(np.asarray(n_neg) < 1.0, SCALE_FLOOR,
                   np.maximum(sigma_l * conv, SCALE_FLOOR))
    b_r = np.where(np.asarray(n_pos) < 1.0, SCALE_FLOOR,
                   np.maximum(sigma_r * conv, SCALE_FLOOR))
    return alpha, b_l, b_r


def fit_aggd(samples):
    """Asymmetric generalized-Gaussian fit by moment matching. One-sided
    moments come from strictly negative / strictly positive samples; an
    empty side lands the corresponding scale on its floor."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < MIN_FIT_SAMPLES:
        raise FitError(f"need at least {MIN_FIT_SAMPLES} samples")
    m_sq = float(np.mean(samples ** 2))
    if m_sq < SCALE_FLOOR ** 2:
        raise FitError("degenerate samples (all near zero)")
    neg = samples[samples < 0.0]
    pos = samples[samples > 0.0]
    alpha, b_l, b_r = aggd_fit_from_moments(
        np.sum(neg ** 2), neg.size, np.sum(pos ** 2), pos.size,
        np.mean(np.abs(samples)), m_sq)
    return AGGDParams(alpha=float(alpha), b_l=float(b_l), b_r=float(b_r))


def aggd_mean_term(alpha, b_l, b_r):
    """First-moment (asymmetry) term of an AGGD fit."""
    return (b_r - b_l) * np.exp(gammaln(2.0 / alpha) - gammaln(1.0 / alpha))


# ---------------------------------------------------------------------------
# Statistical dissimilarities (closed-form KL divergences)
# ---------------------------------------------------------------------------

def fosd(p1, p2):
    """KL divergence between two symmetric generalized Gaussians."""
    return float(fosd_arrays(np.asarray(p1.alpha), np.asarray(p1.b),
                             np.asarray(p2.alpha), np.asarray(p2.b)))


def fosd_arrays(a1, b1, a2, b2):
    cross = np.exp(gammaln((a2 + 1.0) / a1) - gammaln(1.0 / a1)
                   + a2 * (np.log(b1) - np.log(b2)))
    log_norm = (np.log(a1) - np.log(a2) + np.log(b2) - np.log(b1)
                + gammaln(1.0 / a2) - gammaln(1.0 / a1))
    return cross - 1.0 / a1 + log_norm


def sosd(p1, p2):
    """KL divergence between two asymmetric generalized Gaussians."""
    return float(sosd_arrays(
        np.asarray(p1.alpha), np.asarray(p1.b_l), np.asarray(p1.b_r),
        np.asarray(p2.alpha), np.asarray(p2.b_l), np.asarray(p2.b_r)))


def sosd_arrays(a1, bl1, br1, a2, bl2, br2):
    lg = gammaln((a2 + 1.0) / a1) - gammaln(1.0 / a1) - np.log(bl1 + br1)
    cross = (np.exp(lg + (a2 + 1.0) * np.log(bl1) - a2 * np.log(bl2))
             + np.exp(lg + (a2 + 1.0) * np.log(br1) - a2 * np.log(br2)))
    log_norm = (np.log(a1) - np.log(a2) + np.log(bl2 + br2)
                - np.log(bl1 + br1) + gammaln(1.0 / a2) - gammaln(1.0 / a1))
    return cross - 1.0 / a1 + log_norm


# ---------------------------------------------------------------------------
# Global no-reference features
# ---------------------------------------------------------------------------

GLOBAL_NSS_NAMES = (
    "mscn_ggd_alpha", "mscn_ggd_b",
    "sigma_mscn_ggd_alpha", "sigma_mscn_ggd_b",
    "pp_aggd_alpha", "pp_aggd_b_l", "pp_aggd_b_r", "pp_aggd_eta",
)


def global_nss(luma_plane, value_range=1.0):
    """No-reference statistics of one luma plane: GGD fits of the MSCN and
    sigma-MSCN fields plus the direction-averaged AGGD of the paired
    products (shape, both scales, and the asymmetry mean term)."""
    planes = mscn(luma_plane, value_range)
    feats = []
    for field in (planes.mscn, planes.sigma_mscn):
        try:
            g = fit_ggd(field)
        except FitError:
            g = GGDParams(alpha=2.0, b=SCALE_FLOOR)
        feats.extend([g.alpha, g.b])
    acc = np.zeros(4)
    for d in DIRECTIONS:
        try:
            a = fit_aggd(planes.products[d])
        except FitError:
            a = AGGDParams(alpha=2.0, b_l=SCALE_FLOOR, b_r=SCALE_FLOOR)
        acc += np.array([a.alpha, a.b_l, a.b_r,
                         aggd_mean_term(a.alpha, a.b_l, a.b_r)])
    feats.extend((acc / len(DIRECTIONS)).tolist())
    return dict(zip(GLOBAL_NSS_NAMES, feats))


# ---------------------------------------------------------------------------
# Local (per-cut) statistical dissimilarity
# ---------------------------------------------------------------------------

def _cut_counts(shape, cut):
    ones = np.ones(shape)
    return cut_reduce_sum(ones, cut)


def _per_cut_ggd(plane, cut):
    n = _cut_counts(plane.shape, cut)
    s_abs = cut_reduce_sum(np.abs(plane), cut)
    s_sq = cut_reduce_sum(plane * plane, cut)
    m_abs = s_abs / n
    m_sq = s_sq / n
    alpha, b = ggd_fit_from_moments(m_abs, m_sq)
    degenerate = (m_sq < SCALE_FLOOR ** 2) | (n < MIN_FIT_SAMPLES)
    alpha = np.where(degenerate, 2.0, alpha)
    b = np.where(degenerate, SCALE_FLOOR, b)
    return alpha, b


def _product_cut_moments(prod, cut):
    neg = prod < 0.0
    pos = prod > 0.0
    return {
        "s2_neg": cut_reduce_sum(np.where(neg, prod * prod, 0.0), cut),
        "n_neg": cut_reduce_sum(neg.astype(np.float64), cut),
        "s2_pos": cut_reduce_sum(np.where(pos, prod * prod, 0.0), cut),
        "n_pos": cut_reduce_sum(pos.astype(np.float64), cut),
        "s_abs": cut_reduce_sum(np.abs(prod), cut),
        "s_sq": cut_reduce_sum(prod * prod, cut),
        "n": _cut_counts(prod.shape, cut),
    }


def _aggd_from_cut_moments(m):
    n = np.maximum(m["n"], 1.0)
    m_abs = m["s_abs"] / n
    m_sq = m["s_sq"] / n
    alpha, b_l, b_r = aggd_fit_from_moments(
        m["s2_neg"], m["n_neg"], m["s2_pos"], m["n_pos"], m_abs, m_sq)
    degenerate = (m_sq < SCALE_FLOOR ** 2) | (m["n"] < MIN_FIT_SAMPLES)
    alpha = np.where(degenerate, 2.0, alpha)
    b_l = np.where(degenerate, SCALE_FLOOR, b_l)
    b_r = np.where(degenerate, SCALE_FLOOR, b_r)
    return alpha, b_l, b_r


def _grid_shape(plane_shape, cut):
    return (-(-plane_shape[0] // cut), -(-plane_shape[1] // cut))


def local_stsim(ref_luma, test_luma, scale, value_range=1.0,
                pooled_products_below=3):
    """Per-cut first/second-order statistical dissimilarity at one scale.

    Cuts are 8 * 2^(scale-1) pixel squares on the given planes. The
    directional paired products are pooled into one fit on the two smallest
    scales (cuts there are too small for four stable per-direction fits)
    and fit per direction with parameter averaging on the larger ones.
    Returns {"fosd": map, "sosd": map} over the cut grid.
    """
    cut = 8 << (scale - 1)
    ref_planes = mscn(ref_luma, value_range)
    test_planes = mscn(test_luma, value_range)

    ra, rb = _per_cut_ggd(ref_planes.mscn, cut)
    ta, tb = _per_cut_ggd(test_planes.mscn, cut)
    fosd_map = fosd_arrays(ra, rb, ta, tb)

    grid = _grid_shape(ref_luma.shape, cut)

    def _embed(src, fill):
        """Place a (possibly one-short) product-grid map on the full cut
        grid; cuts with no product samples take the substitution value."""
        out = np.full(grid, fill, dtype=np.float64)
        out[:src.shape[0], :src.shape[1]] = src
        return out

    def _direction_moments(planes, d):
        m = _product_cut_moments(planes.products[d], cut)
        return {k: _embed(v, 0.0) for k, v in m.items()}

    if scale < pooled_products_below:
        def pooled_params(planes):
            moments = [_direction_moments(planes, d) for d in DIRECTIONS]
            combined = {k: sum(m[k] for m in moments) for k in moments[0]}
            return _aggd_from_cut_moments(combined)

        r_params = pooled_params(ref_planes)
        t_params = pooled_params(test_planes)
    else:
        def averaged_params(planes):
            acc = None
            for d in DIRECTIONS:
                params = _aggd_from_cut_moments(_direction_moments(planes, d))
                acc = params if acc is None else \
                    tuple(x + y for x, y in zip(acc, params))
            return tuple(x / len(DIRECTIONS) for x in acc)

        r_params = averaged_params(ref_planes)
        t_params = averaged_params(test_planes)

    sosd_map = sosd_arrays(r_params[0], r_params[1], r_params[2],
                           t_params[0], t_params[1], t_params[2])
    return {"fosd": np.maximum(fosd_map, 0.0),
            "sosd": np.maximum(sosd_map, 0.0)}
