#!/usr/bin/env python3
"""
Space report for every index variant on a synthetic graph.

Builds each variant over the same uniform random graph and prints container
size and bytes per triple. With --check the scaled sanity bounds are asserted:

- ring-large stays within 1.5x of 3n*ceil(log2 U)/8 + U bytes;
- rdfcsa-large is about twice ring-large (within 30%);
- vring and uring are larger than ring of the same size class.

The default graph (10^6 triples over 10^4 ids) takes a while to build; use
--triples for a quick look.
"""

import argparse
import math
import os
import sys
import time

import numpy as np
from tqdm import tqdm

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "../src"))

from wcoindex.indices import VARIANTS, build_index
from wcoindex.ingest.container import pack_index
from wcoindex.ingest.parser import Dictionary


def synthetic_graph(n: int, U: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.unique(rng.integers(1, U + 1, size=(n, 3)), axis=0)


def main():
    parser = argparse.ArgumentParser(description="Index size per variant")
    parser.add_argument("--triples", type=int, default=1_000_000)
    parser.add_argument("--universe", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--variants", default=",".join(VARIANTS))
    parser.add_argument("--check", action="store_true", help="Assert the size bounds")
    args = parser.parse_args()

    triples = synthetic_graph(args.triples, args.universe, args.seed)
    n, U = triples.shape[0], args.universe
    print(f"📦 {n} distinct triples, U={U}\n")

    sizes = {}
    for variant in tqdm(args.variants.split(","), desc="variants"):
        start = time.perf_counter()
        index = build_index(triples, U, variant)
        container = pack_index(index, Dictionary.identity(U))
        sizes[variant] = container.nbytes
        tqdm.write(
            f"{variant:<14} {container.nbytes:>12} bytes  "
            f"{container.bpt:8.2f} B/triple  built in {time.perf_counter() - start:6.2f}s"
        )

    if not args.check:
        return
    bound = 1.5 * (3 * n * math.ceil(math.log2(U)) / 8 + U)
    print(f"\nring-large bound: {bound:.0f} bytes")
    assert sizes["ring-large"] <= bound
    ratio = sizes["rdfcsa-large"] / sizes["ring-large"]
    print(f"rdfcsa-large / ring-large: {ratio:.2f}")
    assert 1.4 <= ratio <= 2.6
    for size in ("large", "small"):
        assert sizes[f"vring-{size}"] > sizes[f"ring-{size}"]
        assert sizes[f"uring-{size}"] > sizes[f"ring-{size}"]
    print("✅ size bounds hold")


if __name__ == "__main__":
    main()
