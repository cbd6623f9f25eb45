"""Feature CSV format.

One header comment carrying the manifest hash, a column header in manifest
order, one row per frame, and a final per-video row. Values use shortest
round-trip float formatting; absent entries (temporal features on the first
frame) are empty fields. Output bytes are deterministic.
"""

from .errors import AssemblyError


def _fmt(value):
    return "" if value is None else repr(float(value))


def write_features_csv(path, manifest, per_frame, per_video):
    lines = [f"# manifest_hash={manifest.content_hash}"]
    lines.append(",".join(["frame"] + manifest.names))
    for i, vec in enumerate(per_frame):
        if len(vec) != len(manifest):
            raise AssemblyError(
                f"frame {i} vector length {len(vec)} != manifest "
                f"{len(manifest)}")
        lines.append(",".join([str(i)] + [_fmt(v) for v in vec]))
    lines.append(",".join(["video"] + [_fmt(v) for v in per_video]))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_features_csv(path):
    """Returns (manifest_hash, names, per_frame rows, per_video row)."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or not lines[0].startswith("# manifest_hash="):
        raise AssemblyError(f"{path} is not a feature CSV (missing hash line)")
    manifest_hash = lines[0].split("=", 1)[1]
    names = lines[1].split(",")[1:]
    per_frame, per_video = [], None
    for ln in lines[2:]:
        if not ln:
            continue
        cells = ln.split(",")
        row = [None if c == "" else float(c) for c in cells[1:]]
        if cells[0] == "video":
            per_video = row
        else:
            per_frame.append(row)
    if per_video is None:
        raise AssemblyError(f"{path} has no per-video row")
    return manifest_hash, names, per_frame, per_video
