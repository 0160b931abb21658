"""Check Riemann-Roch on every vertex-supported divisor class of a few corpus graphs.

    python3 scripts/rr_sweep.py theta banana3 K4 --random 200
"""

import argparse
import random
import time

from tropdiv import corpus
from tropdiv.graph import MetricGraph, genus
from tropdiv.oracle import vertex_class_representatives
from tropdiv.rank import rr_check


def random_graph(rng, n_max, extra):
    n = rng.randint(1, n_max)
    ids = [f"v{i}" for i in range(n)]
    edges = [(f"e{i}", ids[rng.randrange(i)], ids[i]) for i in range(1, n)]
    for _ in range(rng.randint(0, extra)):
        edges.append((f"e{len(edges) + 1}", rng.choice(ids), rng.choice(ids)))
    return MetricGraph.build(ids, edges)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graphs", nargs="*", default=["theta", "banana3", "K4", "three-petal"])
    ap.add_argument("--random", type=int, default=0, help="also test this many random graphs")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    failures = 0
    for name in args.graphs:
        g = corpus.load_graph(name)
        gen = genus(g).unweighted
        t0 = time.perf_counter()
        n = 0
        for deg in range(-2, 2 * gen + 1):
            for d in vertex_class_representatives(g, deg):
                n += 1
                if not rr_check(d).equal:
                    failures += 1
                    print(f"FAIL {name}: {d}")
        print(f"{name:14s} g={gen}  classes={n:6d}  {time.perf_counter() - t0:6.1f}s")

    rng = random.Random(args.seed)
    for _ in range(args.random):
        g = random_graph(rng, 8, 3)
        gen = genus(g).unweighted
        for deg in range(-2, 2 * gen + 1):
            for d in vertex_class_representatives(g, deg):
                if not rr_check(d).equal:
                    failures += 1
                    print(f"FAIL {g.to_json()}: {d}")
    if args.random:
        print(f"random graphs: {args.random}")
    print("failures:", failures)
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
