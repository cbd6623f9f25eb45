"""Cut partitioning, soft bin assignment, and feature-vector assembly.

Each scale's cut grid carries three low-level measures per cut (mean
luminance, spatial coefficient of variation, temporal coefficient of
variation over the recent frame ring) and four Gaussian membership weights
per measure type. Quality maps are pooled per bin (weighted mean, or
weighted Minkowski for similarity maps), the worst bin per type models
quality saliency, and per-scale values fuse into multi-scale features in
manifest order.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import AssemblyError
from .planes import cut_reduce_mean
from .nss import GLOBAL_NSS_NAMES

NUM_BINS = 4
BIN_TYPES = ("lum", "spat", "temp")
EMPTY_BIN_WEIGHT = 1e-6
MEAN_FLOOR = 1e-6
MS_FUSION_WEIGHTS = (0.0448, 0.2856, 0.3001, 0.2363)
SCALES = (1, 2, 3, 4)
VARIANTS = ("plain", "hdrmax")

WAVELET_MAPS = (
    "ssim_mu_l", "ssim_sigma_l", "ssim_mu_c", "ssim_sigma_c",
    "vif_l", "vif_c", "tvif_l", "tvif_c",
    "srred_l", "trred_l", "srred_c", "trred_c",
    "dlm",
)
STSIM_MAPS = ("fosd", "sosd")
ALL_MAPS = WAVELET_MAPS + STSIM_MAPS

DISTORTION_MAPS = frozenset(
    {"srred_l", "trred_l", "srred_c", "trred_c", "fosd", "sosd"})
MINKOWSKI_MAPS = frozenset(
    {"ssim_mu_l", "ssim_sigma_l", "ssim_mu_c", "ssim_sigma_c"})
PER_BIN_MAPS = ("srred_l", "trred_l", "srred_c", "trred_c")


@dataclass
class BinConfig:
    """Four equally spaced bins per measure type over a fixed domain."""

    domains: dict = field(default_factory=lambda: {
        "lum": (0.0, 1.0), "spat": (0.0, 1.0), "temp": (0.0, 1.0)})

    def centers(self, bin_type):
        lo, hi = self.domains[bin_type]
        return np.array([lo + (2 * b + 1) * (hi - lo) / 8.0
                         for b in range(NUM_BINS)])

    def width(self, bin_type):
        lo, hi = self.domains[bin_type]
        return (hi - lo) / NUM_BINS


def memberships(measure_map, bin_type, cfg=None):
    """Gaussian membership weights, shape (4, grid_h, grid_w); measures are
    clamped to the bin domain before evaluation. A cut at a bin center gets
    weight 1; at half a bin width, exp(-1/2)."""
    cfg = cfg or BinConfig()
    lo, hi = cfg.domains[bin_type]
    m = np.clip(measure_map, lo, hi)
    centers = cfg.centers(bin_type)
    half_w = cfg.width(bin_type) / 2.0
    return np.exp(-((m[None, :, :] - centers[:, None, None]) ** 2)
                  / (2.0 * half_w * half_w))


@dataclass
class CutGrid:
    """Per-scale cut measures and their bin membership weights."""

    lum: np.ndarray
    spat: np.ndarray
    temp: np.ndarray
    weights: dict

    @classmethod
    def from_measures(cls, lum, spat, temp, cfg=None):
        cfg = cfg or BinConfig()
        return cls(lum=lum, spat=spat, temp=temp, weights={
            t: memberships(m, t, cfg)
            for t, m in (("lum", lum), ("spat", spat), ("temp", temp))})


def cut_measures(moments, frame_ring, scale):
    """Reference-side L/S/T measures over the cut grid at one scale.

    L and S come from the shared moment maps (cut variance composes the
    within-window energies with the spread of window means); T divides the
    cut mean of the per-pixel temporal deviation by the cut mean of the
    temporal mean over the buffered frames. With a single buffered frame,
    T is zero.
    """
    i = scale - 1
    mu = moments.luma.mu_x[i]
    var = moments.luma.var_x[i]
    lum = cut_reduce_mean(mu, 4)
    mean_sq = cut_reduce_mean(mu * mu, 4)
    within = cut_reduce_mean(var, 4)
    cut_var = np.maximum(within + mean_sq - lum * lum, 0.0)
    spat = np.sqrt(cut_var) / np.maximum(lum, MEAN_FLOOR)

    if len(frame_ring) < 2:
        temp = np.zeros_like(lum)
    else:
        stack = np.stack(frame_ring)
        t_mean = stack.mean(axis=0)
        t_std = stack.std(axis=0)
        cut = 4 << scale
        num = cut_reduce_mean(t_std, cut)
        den = cut_reduce_mean(t_mean, cut)
        temp = num / np.maximum(den, MEAN_FLOOR)
    return lum, spat, temp


def aggregate(quality_map, bin_weights, minkowski=False):
    """Weighted pooling of a cut-level map into per-bin scalars.

    Returns (values, empty) with one entry per bin; ``minkowski`` switches
    to cubic pooling of (1 - value), the similarity-map convention. Bins
    whose total membership is negligible are flagged empty.
    """
    w = bin_weights.reshape(bin_weights.shape[0], -1)
    v = quality_map.reshape(-1)
    totals = w.sum(axis=1)
    empty = totals < EMPTY_BIN_WEIGHT
    safe = np.where(empty, 1.0, totals)
    if minkowski:
        pooled = (w @ ((1.0 - v) ** 3)) / safe
        values = 1.0 - np.cbrt(np.maximum(pooled, 0.0))
    else:
        values = (w @ v) / safe
    return values, empty


def worst_bin(values, empty, polarity_distortion, fallback):
    """Worst-quality bin value: max over non-empty bins for distortion
    features, min for quality features; all-empty falls back to the map's
    unweighted mean."""
    if np.all(empty):
        return fallback
    masked = values[~empty]
    return float(np.max(masked) if polarity_distortion else np.min(masked))


def fuse_scales(values, weights=MS_FUSION_WEIGHTS):
    """Normalized weighted mean over scales; absent entries (None) drop out
    and the weights renormalize over what remains."""
    num = den = 0.0
    for v, w in zip(values, weights):
        if v is None:
            continue
        num += w * v
        den += w
    if den == 0.0:
        return None
    return num / den


# ---------------------------------------------------------------------------
# Feature manifest
# ---------------------------------------------------------------------------

AGGREGATIONS = ("mean", "worst_lum", "worst_spat", "worst_temp")


def build_manifest():
    """The canonical ordered feature list: four aggregations of every map in
    both variants, per-bin values for the entropy-difference maps, and the
    global no-reference statistics."""
    entries = []
    for variant in VARIANTS:
        for map_name in ALL_MAPS:
            for agg in AGGREGATIONS:
                entries.append({
                    "name": f"{map_name}.{variant}.{agg}",
                    "kind": "map",
                    "map": map_name,
                    "variant": variant,
                    "aggregation": agg,
                    "polarity": ("distortion" if map_name in DISTORTION_MAPS
                                 else "quality"),
                })
    for variant in VARIANTS:
        for map_name in PER_BIN_MAPS:
            for bin_type in BIN_TYPES:
                for b in range(NUM_BINS):
                    entries.append({
                        "name": f"{map_name}.{variant}.bin_{bin_type}{b}",
                        "kind": "map",
                        "map": map_name,
                        "variant": variant,
                        "aggregation": f"bin_{bin_type}{b}",
                        "polarity": "distortion",
                    })
    for variant in VARIANTS:
        for nss_name in GLOBAL_NSS_NAMES:
            entries.append({
                "name": f"nss.{variant}.{nss_name}",
                "kind": "nss",
                "variant": variant,
                "field": nss_name,
            })
    return entries


@dataclass
class FeatureManifest:
    entries: list

    def __post_init__(self):
        self.names = [e["name"] for e in self.entries]
        if len(set(self.names)) != len(self.names):
            raise AssemblyError("duplicate feature names in manifest")

    def __len__(self):
        return len(self.entries)

    @property
    def content_hash(self):
        canonical = json.dumps(self.entries, sort_keys=True,
                               separators=(",", ":"))
        return "sha256:" + hashlib.sha256(canonical.encode()).hexdigest()

    @classmethod
    def canonical(cls):
        return cls(entries=build_manifest())

    def save(self, path):
        with open(path, "w") as fh:
            json.dump({"hash": self.content_hash, "features": self.entries},
                      fh, indent=2)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            payload = json.load(fh)
        manifest = cls(entries=payload["features"])
        if payload.get("hash") and payload["hash"] != manifest.content_hash:
            raise AssemblyError("manifest file hash does not match contents")
        return manifest


# ---------------------------------------------------------------------------
# Per-frame assembly
# ---------------------------------------------------------------------------

def _feature_from_maps(entry, scale_maps, cut_grids):
    agg = entry["aggregation"]
    minkowski = entry["map"] in MINKOWSKI_MAPS
    distortion = entry["polarity"] == "distortion"
    per_scale = []
    for s_idx, qmap in enumerate(scale_maps):
        if qmap is None:
            per_scale.append(None)
            continue
        grid = cut_grids[s_idx]
        if agg == "mean":
            per_scale.append(float(qmap.mean()))
            continue
        if agg.startswith("worst_"):
            bin_type = agg.split("_", 1)[1]
            values, empty = aggregate(qmap, grid.weights[bin_type], minkowski)
            per_scale.append(worst_bin(values, empty, distortion,
                                       float(qmap.mean())))
            continue
        # bin_<type><index>
        bin_type = agg[4:-1]
        b = int(agg[-1])
        values, empty = aggregate(qmap, grid.weights[bin_type], minkowski)
        per_scale.append(float(qmap.mean()) if empty[b] else float(values[b]))
    return fuse_scales(per_scale)


def assemble_frame(manifest, maps_by_variant, nss_by_variant, cut_grids):
    """One frame's feature values in manifest order; absent temporal maps
    propagate as None. ``maps_by_variant[variant][map_name]`` is a per-scale
    list of cut-level maps, ``cut_grids`` the per-scale reference grids."""
    out = []
    for entry in manifest.entries:
        if entry["kind"] == "nss":
            try:
                out.append(nss_by_variant[entry["variant"]][entry["field"]])
            except KeyError as exc:
                raise AssemblyError(
                    f"missing NSS feature {entry['name']}") from exc
            continue
        try:
            scale_maps = maps_by_variant[entry["variant"]][entry["map"]]
        except KeyError as exc:
            raise AssemblyError(
                f"missing quality map for feature {entry['name']}") from exc
        out.append(_feature_from_maps(entry, scale_maps, cut_grids))
    return out


def reduce_video(per_frame_vectors):
    """Per-video vector: mean over frames, skipping absent entries (the
    temporal features average over frames where they exist)."""
    n_feat = len(per_frame_vectors[0])
    out = []
    for j in range(n_feat):
        vals = [v[j] for v in per_frame_vectors if v[j] is not None]
        out.append(sum(vals) / len(vals) if vals else None)
    return out
