"""Compare the closed-form rank on hyperelliptic graphs with the rank engine.

For every effective vertex-supported divisor of degree <= 2g, prints a table of
how often each branch of the formula (p versus deg - g) was used.

    python3 scripts/hyp_rank_sweep.py theta banana4 ladder4
"""

import argparse
import itertools
import time
from collections import Counter

from tropdiv import corpus
from tropdiv.divisor import Divisor
from tropdiv.graph import genus
from tropdiv.hyperelliptic import hyp_rank, p_value
from tropdiv.rank import rank_weighted

DEFAULT = ["theta", "banana3", "banana4", "three-petal", "weighted2", "weighted3"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graphs", nargs="*", default=DEFAULT)
    args = ap.parse_args()

    bad = 0
    for name in args.graphs:
        g = corpus.load_graph(name)
        gw = genus(g).weighted
        t0 = time.perf_counter()
        branches = Counter()
        for deg in range(2 * gw + 1):
            for combo in itertools.combinations_with_replacement(g.vertex_ids, deg):
                d = Divisor(g, [(v, 1) for v in combo])
                p = p_value(d, g)
                branches["p" if deg - p <= gw else "deg-g"] += 1
                if hyp_rank(d, g) != rank_weighted(d, g):
                    bad += 1
                    print(f"MISMATCH {name}: {d}")
        total = sum(branches.values())
        print(
            f"{name:22s} g={gw}  divisors={total:6d}  p-branch={branches['p']:6d}  "
            f"deg-g branch={branches['deg-g']:6d}  {time.perf_counter() - t0:6.1f}s"
        )
    print("mismatches:", bad)
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
