"""Classify every built-in map and print one row per map."""
import argparse

from mmeadapt.adaptedness import classify_mme
from mmeadapt.constructions import GALLERY
from mmeadapt.intervalmap import prepare


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, default=200)
    args = parser.parse_args()
    print(f"{'map':18} {'singularity':22} {'entropy':>9}  verdict")
    for name, build in GALLERY.items():
        fmap = build()
        _, sing = prepare(fmap)
        if sing is None:
            print(f"{name:18} {'none':22} {'':>9}  -")
            continue
        v = classify_mme(fmap, depth=args.depth)
        where = f"{sing.location} {sing.orbit_class}"
        series = f"  [{v.series.describe()}]" if v.series else ""
        print(f"{name:18} {where:22} {v.entropy:9.6f}  {v.line()}{series}")


if __name__ == "__main__":
    main()
