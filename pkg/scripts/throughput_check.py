#!/usr/bin/env python3
"""Quick standalone throughput probe for polynomial construction.

Builds a batch of random trees once, then times only the tree-to-polynomial
conversion, best of several runs.  The acceptance suite enforces the 50k
sentences/s floor on 25-node trees; this script exists for ad-hoc profiling
with other tree sizes.
"""

from __future__ import annotations

import argparse
import random
import time

from scoi.bench import random_tree
from scoi.treepoly import LabelVocabulary, simplified_polynomial


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=25)
    parser.add_argument("--labels", type=int, default=12)
    parser.add_argument("--sentences", type=int, default=5000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    vocab = LabelVocabulary(f"lab{i}" for i in range(args.labels))
    trees = [random_tree(args.nodes, args.labels, rng) for _ in range(args.sentences)]

    best = 0.0
    for run in range(args.repeats):
        start = time.perf_counter()
        for tree in trees:
            simplified_polynomial(tree, vocab)
        elapsed = time.perf_counter() - start
        rate = len(trees) / elapsed
        best = max(best, rate)
        print(f"run {run + 1}: {rate:,.0f} sentences/s ({elapsed:.3f}s)")
    nodes_per_s = best * args.nodes
    print(f"best: {best:,.0f} sentences/s ({nodes_per_s:,.0f} nodes/s)")


if __name__ == "__main__":
    main()
