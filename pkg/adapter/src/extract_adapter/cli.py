"""Minimal CLI: run an extraction described by a JSON manifest."""

from __future__ import annotations

import argparse
import sys

from .errors import AdapterError
from .extract import extract
from .manifest import ExtractionManifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rs-extract",
        description="Encode a folder-per-class image dataset and its prompt "
                    "templates into embedding files",
    )
    parser.add_argument("--manifest", required=True, help="JSON manifest path")
    args = parser.parse_args(argv)
    try:
        manifest = ExtractionManifest.from_json(args.manifest)
        sidecar = extract(manifest)
    except AdapterError as exc:
        print(f"rs-extract: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"rs-extract: io error: {exc}", file=sys.stderr)
        return 2
    print(f"extracted n={sidecar['n']} d={sidecar['d']} k={sidecar['k']} "
          f"tau={sidecar['tau']:.3f} -> {sidecar['files']['images']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
