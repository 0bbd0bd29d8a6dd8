#!/usr/bin/env python3
"""Regenerate the bundled synthetic datasets in data/ (seeded)."""

import pathlib
import sys

from cavityforge.cli import main

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"

DATASETS = [
    ("resonance", "1", "zpl2_resonance.csv"),
    ("lateral", "2", "zpl6_lateral.csv"),
]

if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    for kind, seed, name in DATASETS:
        rc = main(["synth", kind, "--seed", seed, "--noise-frac", "0.02",
                   "-o", str(DATA / name)])
        if rc != 0:
            sys.exit(rc)
        print(f"wrote {DATA / name}")
