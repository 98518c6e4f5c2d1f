"""Sweep the power-law exponent of the singular branch at fixed entropy log 2.

Writes CSV: alpha, strength, verdict, rule, series verdict, upper ratio, bound.
The classifier switches from adapted to nonadapted at alpha = 2, where
log(alpha) meets the entropy.
"""
import argparse
import csv
import sys

import numpy as np

from mmeadapt.adaptedness import classify_mme, integral_bounds
from mmeadapt.constructions import make_power_map


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--start", type=float, default=1.05)
    parser.add_argument("--stop", type=float, default=4.0)
    parser.add_argument("--count", type=int, default=60)
    parser.add_argument("--depth", type=int, default=200)
    parser.add_argument("--output", default="-")
    args = parser.parse_args()
    out = sys.stdout if args.output == "-" else open(args.output, "w", newline="")
    writer = csv.writer(out)
    writer.writerow(["alpha", "strength", "verdict", "rule", "series", "ratio", "bound"])
    for alpha in np.linspace(args.start, args.stop, args.count):
        fmap = make_power_map(float(alpha))
        v = classify_mme(fmap, with_series=False)
        rep = integral_bounds(fmap, depth=args.depth)
        writer.writerow([f"{alpha:.6f}", f"{v.beta.lower:.6f}", v.status, v.rule, rep.verdict,
                         "" if rep.ratio is None else f"{rep.ratio:.6f}",
                         "" if rep.value is None else f"{rep.value:.10g}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
