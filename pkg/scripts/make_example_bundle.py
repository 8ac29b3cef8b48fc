#!/usr/bin/env python3
"""Regenerate the packaged example bundle (src/pgnoise/data/example_bundle.json).

The bundle is a deterministic function of the seeded recipe in
pgnoise.fixtures; rerunning this script must reproduce the committed file
byte for byte (there is a test for that).
"""

import argparse
import os
import sys

from pgnoise.bundle_io import serialize_bundle
from pgnoise.fixtures import make_example_bundle

DEFAULT_OUT = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    "src", "pgnoise", "data", "example_bundle.json",
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=DEFAULT_OUT, help="output path")
    args = parser.parse_args(argv)
    data = serialize_bundle(make_example_bundle())
    os.makedirs(os.path.dirname(args.out), exist_ok=True)
    with open(args.out, "wb") as fh:
        fh.write(data)
    print(f"wrote {len(data)} bytes to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
