"""Time handle reduction against the Garside normal form on random braid words.

    python scripts/braid_decider_benchmark.py --strands 4 --length 40 --samples 200
"""

import argparse
import random
import time

from qbraid.braid_group import Word, braid_is_trivial


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--strands", type=int, default=4)
    ap.add_argument("--length", type=int, default=30)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    gens = [s * i for i in range(1, args.strands) for s in (1, -1)]
    words = []
    for _ in range(args.samples):
        w = Word(tuple(rng.choice(gens) for _ in range(args.length)))
        words.append(w * w.inverse() if rng.random() < 0.5 else w)

    results = {}
    for method in ("handle", "garside"):
        start = time.perf_counter()
        results[method] = [braid_is_trivial(args.strands, w, method=method) for w in words]
        print(f"{method:8s} {time.perf_counter() - start:.3f}s")
    agree = sum(a == b for a, b in zip(results["handle"], results["garside"]))
    print(f"agreement {agree}/{len(words)}, trivial {sum(results['handle'])}")


if __name__ == "__main__":
    main()
