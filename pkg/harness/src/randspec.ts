/**
 * Seeded random lossless spec documents for differential runs.
 *
 * Generated code runs on the build host, so the platform is pinned to the
 * host ABI: 4-byte int, little-endian. Values come from a narrow pool so
 * rows dedupe, contain and overlap each other often.
 */

export type Rand = () => number;

export function mulberry32(seed: number): Rand {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

const CTYPES = ["unsigned char", "signed char", "unsigned int", "int"] as const;
type CType = (typeof CTYPES)[number];

function range(ctype: CType): [number, number] {
  switch (ctype) {
    case "unsigned char":
      return [0, 255];
    case "signed char":
      return [-128, 127];
    case "unsigned int":
      return [0, 4294967295];
    case "int":
      return [-2147483648, 2147483647];
  }
}

function randInt(rand: Rand, lo: number, hi: number): number {
  return lo + Math.floor(rand() * (hi - lo + 1));
}

function pick<T>(rand: Rand, items: readonly T[]): T {
  return items[Math.floor(rand() * items.length)];
}

function value(rand: Rand, lo: number, hi: number): number {
  if (rand() < 0.8) {
    const pool = [0, 1, 2, 3, 4, 8, 16, 32, lo, hi].filter((v) => lo <= v && v <= hi);
    return pick(rand, pool);
  }
  // stay well inside the safe-integer range for wide types
  return randInt(rand, Math.max(lo, -100000), Math.min(hi, 100000));
}

type Tree = number | null | Tree[];

function tree(rand: Rand, dims: number[], depth: number, lo: number, hi: number, nullProb: number): Tree {
  if (depth === dims.length) return value(rand, lo, hi);
  if (rand() < nullProb) return null;
  return Array.from({ length: dims[depth] }, () => tree(rand, dims, depth + 1, lo, hi, nullProb));
}

/** Truncating integer division, as C does it. */
function cDiv(a: number, b: number): number {
  return Math.trunc(a / b);
}

export function randomLosslessSpec(rand: Rand): object {
  const methodSets = [
    ["remove_subarrays"],
    ["remove_subarrays", "greedy"],
    ["remove_subarrays", "greedy", "reverse"],
    ["remove_subarrays", "greedy", "mapping"],
    ["remove_subarrays", "greedy", "reverse", "mapping"],
  ];
  const methods = pick(rand, methodSets);

  const arrays: Record<string, unknown>[] = [];
  const count = randInt(rand, 1, 10);
  for (let i = 0; i < count; i++) {
    const ctype = pick(rand, CTYPES);
    const ndims = randInt(rand, 1, 3);
    const dims = Array.from({ length: ndims }, () => randInt(rand, 1, 4));
    const [lo, hi] = range(ctype);
    const nullProb = rand() < 0.3 ? 0.15 : 0.0;
    arrays.push({ name: `arr${i}`, ctype, dims, data: tree(rand, dims, 0, lo, hi, nullProb) });
  }

  const mappings: Record<string, unknown>[] = [];
  if (methods.includes("mapping")) {
    const sources = arrays.filter(
      (a) =>
        (a.dims as number[]).length === 1 &&
        a.data !== null &&
        (a.ctype as string).includes("char"),
    );
    if (sources.length > 0) {
      const src = pick(rand, sources);
      const srcData = src.data as number[];
      const [lo, hi] = range(src.ctype as CType);
      for (let attempt = 0; attempt < 8; attempt++) {
        const n = randInt(rand, 1, srcData.length);
        const w = randInt(rand, 0, srcData.length - n);
        const num = pick(rand, [-2, -1, 1, 2, 3]);
        const den = pick(rand, [-3, -2, 1, 2, 4]);
        const add = randInt(rand, -4, 4);
        const vals = srcData.slice(w, w + n).map((x) => cDiv(x * num, den) + add);
        if (vals.every((v) => lo <= v && v <= hi)) {
          arrays.push({ name: "mapped0", ctype: src.ctype, dims: [n], data: vals });
          mappings.push({ source: src.name, target: "mapped0", num, den, add });
          break;
        }
      }
    }
  }

  const scalars =
    rand() < 0.3 ? [{ name: "limit", ctype: "unsigned char", value: randInt(rand, 0, 255) }] : [];

  return {
    platform: { int_bytes: 4, endianness: "little", pointer_bytes: 8 },
    options: {
      methods,
      tie_strategy: pick(rand, ["first", "last", "random"]),
      seed: randInt(rand, 0, 999999),
    },
    scalars,
    arrays,
    mappings,
  };
}
