#!/usr/bin/env python3
"""Timing probe for the two expensive passes on synthetic segment sets.

Sub-array removal stays fast at thousands of segments; greedy merging is
the super-linear part, so it is sampled at smaller sizes.
"""

import argparse
import random
import time

from compactor import Consumer, RowPath, Segment, greedy_compact, remove_subarrays


def synthetic_segments(rng: random.Random, count: int, with_containment: bool) -> list[Segment]:
    base_n = count // 2 if with_containment else count
    base = [bytes(rng.randrange(256) for _ in range(rng.randint(16, 40))) for _ in range(base_n)]
    blobs = list(base)
    while len(blobs) < count:
        b = rng.choice(base)
        lo = rng.randrange(0, len(b) - 4)
        hi = rng.randint(lo + 2, len(b))
        blobs.append(b[lo:hi])
    return [
        Segment(d, (Consumer(RowPath(f"s{i}", ()), 0, len(d), False, 1),))
        for i, d in enumerate(blobs)
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    rng = random.Random(args.seed)

    for count in (500, 1000, 3000):
        segs = synthetic_segments(rng, count, with_containment=True)
        t0 = time.perf_counter()
        out = remove_subarrays(segs)
        dt = (time.perf_counter() - t0) * 1000
        print(f"remove_subarrays  n={count:5d}  survivors={len(out):5d}  {dt:8.1f} ms")

    for count in (50, 100, 200):
        segs = synthetic_segments(rng, count, with_containment=False)
        t0 = time.perf_counter()
        result = greedy_compact(remove_subarrays(segs))
        dt = (time.perf_counter() - t0) * 1000
        total = sum(len(s.data) for s in segs)
        print(
            f"greedy_compact    n={count:5d}  {total:6d} -> {len(result.compacted):6d} bytes"
            f"  {dt:8.1f} ms"
        )


if __name__ == "__main__":
    main()
