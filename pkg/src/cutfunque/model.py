"""Serialized regression models and the inference paths.

The model file is JSON: a family tag, per-feature normalization, the family
parameters (linear weights, a kernel expansion, or a forest of binary
trees), and the content hash of the feature manifest it was trained
against. Prediction refuses manifest mismatches and non-finite features.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import PredictionError

MODEL_TYPES = ("linear-svr", "gaussian-svr", "random-forest")


@dataclass
class QualityModel:
    model_type: str
    manifest_hash: str
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    params: dict

    def __post_init__(self):
        if self.model_type not in MODEL_TYPES:
            raise PredictionError(f"unknown model type {self.model_type}")
        self.norm_mean = np.asarray(self.norm_mean, dtype=np.float64)
        self.norm_scale = np.asarray(self.norm_scale, dtype=np.float64)
        n = len(self.norm_mean)
        if self.model_type == "linear-svr":
            if len(self.params["weights"]) != n:
                raise PredictionError("weight vector does not match manifest")
        elif self.model_type == "gaussian-svr":
            sv = np.asarray(self.params["support_vectors"])
            if sv.ndim != 2 or sv.shape[1] != n:
                raise PredictionError("support vectors do not match manifest")
            if len(self.params["dual_coefs"]) != sv.shape[0]:
                raise PredictionError("dual coefficient count mismatch")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            d = json.load(fh)
        return cls(
            model_type=d["model_type"],
            manifest_hash=d["manifest_hash"],
            norm_mean=np.asarray(d["normalization"]["mean"]),
            norm_scale=np.asarray(d["normalization"]["scale"]),
            params=d["params"],
        )

    def save(self, path):
        payload = {
            "model_type": self.model_type,
            "manifest_hash": self.manifest_hash,
            "normalization": {
                "mean": self.norm_mean.tolist(),
                "scale": self.norm_scale.tolist(),
            },
            "params": self.params,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)


def _tree_predict(nodes, x):
    idx = 0
    while True:
        node = nodes[idx]
        if "value" in node:
            return node["value"]
        idx = (node["left"] if x[node["feature"]] <= node["threshold"]
               else node["right"])


def predict(vector, model, feature_names=None, manifest_hash=None):
    """Score one feature vector with a loaded model.

    ``manifest_hash`` (when given) must match the hash stored in the model;
    non-finite features fail with the offending feature named.
    """
    if manifest_hash is not None and manifest_hash != model.manifest_hash:
        raise PredictionError(
            "model was trained against a different feature manifest "
            f"({model.manifest_hash} != {manifest_hash})")
    x = np.asarray(
        [np.nan if v is None else float(v) for v in vector], dtype=np.float64)
    if x.shape != model.norm_mean.shape:
        raise PredictionError(
            f"feature vector length {x.size} does not match model "
            f"({model.norm_mean.size})")
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        name = (feature_names[bad[0]] if feature_names is not None
                else f"feature[{bad[0]}]")
        raise PredictionError(f"non-finite feature value: {name}")

    xn = (x - model.norm_mean) / model.norm_scale
    p = model.params
    if model.model_type == "linear-svr":
        return float(np.dot(p["weights"], xn) + p["bias"])
    if model.model_type == "gaussian-svr":
        sv = np.asarray(p["support_vectors"], dtype=np.float64)
        alphas = np.asarray(p["dual_coefs"], dtype=np.float64)
        d2 = np.sum((sv - xn[None, :]) ** 2, axis=1)
        return float(np.dot(alphas, np.exp(-p["gamma"] * d2)) + p["bias"])
    # random forest
    leaves = [_tree_predict(t["nodes"], xn) for t in p["trees"]]
    return float(np.mean(leaves))
