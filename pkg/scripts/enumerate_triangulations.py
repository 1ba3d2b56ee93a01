"""Count unimodular triangulations of junior simplices for a range of isolated Gorenstein quotients.

    python scripts/enumerate_triangulations.py --max-order 15
"""

import argparse
import itertools
import math

from qbraid.errors import SizeError
from qbraid.fan_analysis import classify_surface, star_fan
from qbraid.quotient_fan import QuotientData, build_lattice, enumerate_unimodular_triangulations, resolution_fan


def isolated_weights(r):
    """Weights (1, b, c) with b <= c, b + c = r - 1, every weight coprime to r."""
    for b in range(1, r):
        c = r - 1 - b
        if b <= c and all(math.gcd(w, r) == 1 for w in (1, b, c)):
            yield (1, b, c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=13)
    ap.add_argument("--cap", type=int, default=16)
    args = ap.parse_args()

    print(f"{'quotient':>16} {'junior':>6} {'triangulations':>14}  surfaces of the first one")
    for r in range(2, args.max_order + 1):
        for w in isolated_weights(r):
            q = QuotientData(r, w)
            try:
                tris = enumerate_unimodular_triangulations(q, cap=args.cap)
            except SizeError:
                print(f"{'1/%d%s' % (r, w):>16}  skipped (point cap)")
                continue
            fan = resolution_fan(tris[0], build_lattice(q))
            n = len(tris[0].points) - 3
            labels = [classify_surface(star_fan(fan, k)).label for k in range(n)]
            print(f"{'1/%d%s' % (r, w):>16} {n:>6} {len(tris):>14}  {' '.join(labels)}")


if __name__ == "__main__":
    main()
