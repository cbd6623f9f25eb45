"""Regenerate the packaged feature manifest from the canonical builder."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from cutfunque.binning import FeatureManifest


def main(out_path):
    manifest = FeatureManifest.canonical()
    manifest.save(out_path)
    print(f"{len(manifest)} features, hash {manifest.content_hash}")
    print(f"wrote {out_path}")


if __name__ == "__main__":
    default = os.path.join(os.path.dirname(__file__), "..", "src",
                           "cutfunque", "data", "manifest.json")
    main(sys.argv[1] if len(sys.argv) > 1 else default)
