"""Command line interface: feature extraction, prediction, and calibration."""

import argparse
import json
import sys
import time
from importlib import resources

from .binning import FeatureManifest
from .errors import ConfigError, CutFunqueError
from .features_io import write_features_csv
from .model import QualityModel, predict
from .pipeline import PipelineConfig, VideoJob, extract_features
from .pucolor import (ChromaticBasis, PUCalibration, ThresholdModel,
                      Y_MAX_DEFAULT, Y_MIN_DEFAULT, calibrate)
from .video_io import VideoSpec
from .wavelet import CsfWeights


def _data_path(name):
    return resources.files("cutfunque").joinpath("data", name)


def load_default_calibration():
    with resources.as_file(_data_path("calibration_default.json")) as p:
        return PUCalibration.load(p)


def load_default_csf():
    with resources.as_file(_data_path("csf_watson.json")) as p:
        return CsfWeights.from_json(p)


def load_manifest():
    with resources.as_file(_data_path("manifest.json")) as p:
        return FeatureManifest.load(p)


def _parse_spec(arg):
    """A video spec given as a JSON file path or an inline JSON object."""
    if arg is None:
        return VideoSpec()
    text = arg.strip()
    if text.startswith("{"):
        return VideoSpec.from_dict(json.loads(text))
    with open(arg) as fh:
        return VideoSpec.from_dict(json.load(fh))


def _parse_frames(arg):
    if arg is None:
        return 0, None
    try:
        a, b = arg.split(":")
        return int(a or 0), (int(b) if b else None)
    except ValueError as exc:
        raise ConfigError(f"bad --frames range {arg!r} (want A:B)") from exc


def _add_io_args(sub):
    sub.add_argument("--ref", required=True, help="reference video path")
    sub.add_argument("--test", required=True, help="test video path")
    sub.add_argument("--ref-spec", help="reference spec (JSON file or inline)")
    sub.add_argument("--test-spec", help="test spec (JSON file or inline)")
    sub.add_argument("--calib", help="calibration JSON (default: built-in)")
    sub.add_argument("--out", required=True, help="output path")
    sub.add_argument("--frames", help="frame range A:B (half-open)")
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--viewing-heights", type=float, default=3.0)


def _build_job(args):
    calib = (PUCalibration.load(args.calib) if args.calib
             else load_default_calibration())
    start, stop = _parse_frames(args.frames)
    return VideoJob(
        ref_path=args.ref, ref_spec=_parse_spec(args.ref_spec),
        test_path=args.test, test_spec=_parse_spec(args.test_spec),
        calib=calib, csf=load_default_csf(), manifest=load_manifest(),
        cfg=PipelineConfig(viewing_heights=args.viewing_heights),
        frame_start=start, frame_stop=stop)


def cmd_features(args):
    job = _build_job(args)
    per_frame, per_video = extract_features(job, workers=args.workers)
    write_features_csv(args.out, job.manifest, per_frame, per_video)
    print(f"wrote {len(per_frame)} frame rows to {args.out}")
    return 0


def cmd_predict(args):
    t0 = time.perf_counter()
    job = _build_job(args)
    model = QualityModel.load(args.model)
    if model.manifest_hash != job.manifest.content_hash:
        raise ConfigError(
            "model manifest hash does not match this build's manifest; "
            "refusing to predict")
    per_frame, per_video = extract_features(job, workers=args.workers)
    score = predict(per_video, model, feature_names=job.manifest.names,
                    manifest_hash=job.manifest.content_hash)
    elapsed = time.perf_counter() - t0
    report = {
        "score": score,
        "frame_count": len(per_frame),
        "model_hash": model.manifest_hash,
        "timings": {
            "total_seconds": elapsed,
            "per_frame_seconds": elapsed / max(len(per_frame), 1),
        },
    }
    with open(args.out, "w") as fh:
        json.dump(report, fh, indent=2)
    print(repr(score))
    return 0


def cmd_calibrate(args):
    with open(args.threshold_model) as fh:
        tm_spec = json.load(fh)
    model = ThresholdModel.from_dict(tm_spec)
    basis = None
    if "m_dkl" in tm_spec:
        basis = ChromaticBasis(m_dkl=tm_spec["m_dkl"])
    calib = calibrate(model, basis=basis, y_min=args.y_min, y_max=args.y_max,
                      grid_points=args.grid_points)
    calib.save(args.out)
    r2 = ", ".join(f"{v:.6f}" for v in calib.r2)
    print(f"calibration written to {args.out} (fit r2: {r2})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cutfunque",
        description="Objective quality model for compressed tone-mapped "
                    "HDR video")
    subs = parser.add_subparsers(dest="command", required=True)

    p_feat = subs.add_parser("features", help="extract a feature CSV")
    _add_io_args(p_feat)
    p_feat.set_defaults(func=cmd_features)

    p_pred = subs.add_parser("predict", help="predict a quality score")
    _add_io_args(p_pred)
    p_pred.add_argument("--model", required=True, help="model JSON path")
    p_pred.set_defaults(func=cmd_predict)

    p_cal = subs.add_parser("calibrate",
                            help="integrate a threshold model and fit the "
                                 "encoder nonlinearities")
    p_cal.add_argument("--threshold-model", required=True,
                       help="threshold model JSON")
    p_cal.add_argument("--out", required=True)
    p_cal.add_argument("--grid-points", type=int, default=64)
    p_cal.add_argument("--y-min", type=float, default=Y_MIN_DEFAULT)
    p_cal.add_argument("--y-max", type=float, default=Y_MAX_DEFAULT)
    p_cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CutFunqueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
