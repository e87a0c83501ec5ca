"""Seeded random specification documents for round-trip and fuzz testing.

Values are drawn mostly from a narrow pool so rows dedupe, contain and
overlap each other often enough to exercise every pipeline path.
"""

import random

from compactor.model import c_div

CTYPES = ["unsigned char", "signed char", "unsigned int", "int"]


def type_range(ctype: str, int_bytes: int) -> tuple[int, int]:
    width = 1 if "char" in ctype else int_bytes
    bits = 8 * width
    if ctype in ("signed char", "int"):
        return -(1 << (bits - 1)), (1 << (bits - 1)) - 1
    return 0, (1 << bits) - 1


def _value(rng: random.Random, lo: int, hi: int) -> int:
    if rng.random() < 0.8:
        pool = [v for v in (0, 1, 2, 3, 4, 8, 16, 32, lo, hi) if lo <= v <= hi]
        return rng.choice(pool)
    return rng.randint(lo, hi)


def _tree(rng, dims, depth, lo, hi, null_prob):
    if depth == len(dims):
        return _value(rng, lo, hi)
    if rng.random() < null_prob:
        return None
    return [_tree(rng, dims, depth + 1, lo, hi, null_prob) for _ in range(dims[depth])]


def random_spec_doc(
    rng: random.Random,
    *,
    methods: list[str],
    max_arrays: int = 20,
    with_mapping: bool = False,
    int_bytes: int | None = None,
    endianness: str | None = None,
    lossy_threshold: float | None = None,
) -> dict:
    """One spec document within the documented bounds: up to `max_arrays`
    arrays, dimensions 1-3, extents 1-4, all four element types, NULLs at
    any legal level. Mappings (when asked for) are valid by construction."""
    int_bytes = int_bytes if int_bytes is not None else rng.choice([2, 4])
    endianness = endianness if endianness is not None else rng.choice(["little", "big"])
    arrays = []
    for i in range(rng.randint(1, max_arrays)):
        ctype = rng.choice(CTYPES)
        dims = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
        lo, hi = type_range(ctype, int_bytes)
        null_prob = rng.choice([0.0, 0.0, 0.15])
        arrays.append(
            {
                "name": f"arr{i}",
                "ctype": ctype,
                "dims": dims,
                "data": _tree(rng, dims, 0, lo, hi, null_prob),
            }
        )

    mappings = []
    if with_mapping:
        # char-typed sources only: C integer promotion then matches c_div exactly
        sources = [
            a
            for a in arrays
            if len(a["dims"]) == 1 and a["data"] is not None and "char" in a["ctype"]
        ]
        if sources:
            src = rng.choice(sources)
            lo, hi = type_range(src["ctype"], int_bytes)
            for _ in range(8):
                n = rng.randint(1, len(src["data"]))
                w = rng.randint(0, len(src["data"]) - n)
                num = rng.choice([-2, -1, 1, 2, 3])
                den = rng.choice([-3, -2, 1, 2, 4])
                add = rng.randint(-4, 4)
                vals = [c_div(x * num, den) + add for x in src["data"][w : w + n]]
                if all(lo <= v <= hi for v in vals):
                    arrays.append(
                        {"name": "mapped0", "ctype": src["ctype"], "dims": [n], "data": vals}
                    )
                    mappings.append(
                        {"source": src["name"], "target": "mapped0", "num": num, "den": den, "add": add}
                    )
                    break

    scalars = []
    if rng.random() < 0.3:
        scalars.append({"name": "limit", "ctype": "unsigned char", "value": rng.randint(0, 255)})

    options = {
        "methods": list(methods),
        "tie_strategy": rng.choice(["first", "last", "random"]),
        "seed": rng.randrange(1_000_000),
    }
    if lossy_threshold is not None:
        options["lossy_threshold"] = lossy_threshold
    return {
        "platform": {
            "int_bytes": int_bytes,
            "endianness": endianness,
            "pointer_bytes": rng.choice([2, 4, 8]),
        },
        "options": options,
        "scalars": scalars,
        "arrays": arrays,
        "mappings": mappings,
    }
