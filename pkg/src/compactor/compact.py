"""Segment-set reduction: containment removal, greedy overlap merging,
optional reversed orientations, lossy averaging of near-duplicates, and
declared affine mappings.

Every pass keeps per-row bookkeeping, so each input row can be located in
the final byte array (offset plus orientation) or resolved through a
mapping accessor. The final array is an approximate shortest superstring
of the surviving segments; an exact exponential solver is included as a
test oracle for tiny instances.
"""

from __future__ import annotations

import itertools
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .model import (
    CompactionMethod,
    CompactionOptions,
    MappingDecl,
    PlatformConfig,
    TieStrategy,
)
from .transform import Consumer, RowPath, Segment, flatten


class MappingError(ValueError):
    """A declared mapping does not reproduce the target array."""


class OracleLimitError(ValueError):
    """Exact-search instance exceeds the configured size limits."""


@dataclass(frozen=True, slots=True)
class PlacementEntry:
    """Where one row lives in the compacted array; offset None marks an
    absent (NULL) node, whose indices may address any level above elements."""

    row: RowPath
    offset: int | None
    size: int = 0
    reversed: bool = False


@dataclass(frozen=True, slots=True)
class MappingAccessor:
    """A resolved mapping: target rows are computed from the source row
    starting at element index source_elem_offset."""

    decl: MappingDecl
    source_elem_offset: int


@dataclass(slots=True)
class LossyMergeRecord:
    distance: float
    threshold: float
    offset: int
    short_len: int
    long_len: int
    drift_introduced: int


@dataclass
class CompactionResult:
    compacted: bytes
    placements: list[PlacementEntry]
    accessors: list[MappingAccessor] = field(default_factory=list)
    # Row bytes as committed after the (optional) lossy stage; the exact
    # content every later stage must preserve. Keyed by (array, indices).
    expected_rows: dict[tuple[str, tuple[int, ...]], bytes] = field(default_factory=dict)
    row_drift: dict[tuple[str, tuple[int, ...]], float] = field(default_factory=dict)
    merges: list[LossyMergeRecord] = field(default_factory=list)
    stage_times_ms: dict[str, float] = field(default_factory=dict)

    def by_row(self) -> dict[tuple[str, tuple[int, ...]], PlacementEntry]:
        return {(p.row.array, p.row.indices): p for p in self.placements}


def overlap_len(a: bytes, b: bytes) -> int:
    """Length of the longest suffix of `a` equal to a prefix of `b`,
    capped at min(len(a), len(b))."""
    if not a or not b:
        return 0
    first = b[:1]
    start = len(a) - len(b)
    if start < 0:
        start = 0
    while True:
        pos = a.find(first, start)
        if pos < 0:
            return 0
        if b.startswith(a[pos:]):
            return len(a) - pos
        start = pos + 1


def _single_byte_rows(consumers) -> bool:
    return all(c.elem_bytes == 1 for c in consumers)


def _embed(consumers, seg_len: int, base: int, rev: bool) -> list[Consumer]:
    """Re-home consumers of a segment embedded at `base` inside a larger one,
    byte-reversed there when `rev`."""
    out = []
    for c in consumers:
        if rev:
            out.append(
                Consumer(c.row, base + seg_len - c.offset - c.size, c.size, not c.reversed, c.elem_bytes)
            )
        else:
            out.append(Consumer(c.row, base + c.offset, c.size, c.reversed, c.elem_bytes))
    return out


class _Item:
    """Mutable working copy of a segment during a pass."""

    __slots__ = ("sid", "data", "consumers", "drift")
    _ids = itertools.count()

    def __init__(self, data: bytes, consumers, drift: float = 0.0):
        self.sid = next(_Item._ids)
        self.data = data
        self.consumers = list(consumers)
        self.drift = drift

    def reversible(self) -> bool:
        return _single_byte_rows(self.consumers)

    def to_segment(self) -> Segment:
        return Segment(self.data, tuple(self.consumers), self.drift)


def remove_subarrays(segments, *, reverse: bool = False) -> list[Segment]:
    """Drop every segment contained in another one.

    Consumers of a dropped segment re-attach to the container at the first
    matching offset. Survivors keep their input order. With `reverse`, a
    segment whose rows are all one byte wide may also disappear into a
    container holding its byte-reversed image, flipping its consumers'
    orientation.
    """
    # Pass 1: order-preserving dedup of identical (or reversed-identical) content.
    uniq: list[_Item] = []
    index: dict[bytes, int] = {}
    for seg in segments:
        at = index.get(seg.data)
        if at is not None:
            uniq[at].consumers.extend(seg.consumers)
            uniq[at].drift = max(uniq[at].drift, seg.drift)
            continue
        if reverse and _single_byte_rows(seg.consumers):
            at = index.get(seg.data[::-1])
            if at is not None:
                host = uniq[at]
                host.consumers.extend(_embed(seg.consumers, len(seg.data), 0, True))
                host.drift = max(host.drift, seg.drift)
                continue
        index[seg.data] = len(uniq)
        uniq.append(_Item(seg.data, seg.consumers, seg.drift))

    # Pass 2: strict containment, longest first. A candidate can only sit
    # inside a strictly longer survivor (equal content was deduped above).
    order = sorted(range(len(uniq)), key=lambda i: -len(uniq[i].data))
    survivors: list[int] = []
    keep: set[int] = set()
    for i in order:
        item = uniq[i]
        rdata = item.data[::-1] if reverse and item.reversible() else None
        home = -1
        for j in survivors:
            big = uniq[j]
            if len(big.data) <= len(item.data):
                break
            pos = big.data.find(item.data)
            if pos >= 0:
                big.consumers.extend(_embed(item.consumers, len(item.data), pos, False))
                big.drift = max(big.drift, item.drift)
                home = j
                break
            if rdata is not None:
                pos = big.data.find(rdata)
                if pos >= 0:
                    big.consumers.extend(_embed(item.consumers, len(item.data), pos, True))
                    big.drift = max(big.drift, item.drift)
                    home = j
                    break
        if home < 0:
            survivors.append(i)
            keep.add(i)
    return [uniq[i].to_segment() for i in range(len(uniq)) if i in keep]


def _best_orientation(a: _Item, b: _Item, reverse: bool, rev_cache: dict[int, bytes | None]):
    """Best overlap of a's tail into b's head over allowed orientations.

    Forward/forward is preferred; a reversed orientation is taken only when
    it is strictly longer.
    """
    k = overlap_len(a.data, b.data)
    oa = ob = False
    if reverse:
        ra = rev_cache.get(a.sid)
        if ra is None and a.sid not in rev_cache:
            ra = a.data[::-1] if a.reversible() else None
            rev_cache[a.sid] = ra
        rb = rev_cache.get(b.sid)
        if rb is None and b.sid not in rev_cache:
            rb = b.data[::-1] if b.reversible() else None
            rev_cache[b.sid] = rb
        if rb is not None:
            k2 = overlap_len(a.data, rb)
            if k2 > k:
                k, oa, ob = k2, False, True
        if ra is not None:
            k2 = overlap_len(ra, b.data)
            if k2 > k:
                k, oa, ob = k2, True, False
            if rb is not None:
                k2 = overlap_len(ra, rb)
                if k2 > k:
                    k, oa, ob = k2, True, True
    return k, oa, ob


def _merge_items(a: _Item, oa: bool, b: _Item, ob: bool, k: int) -> _Item:
    adata = a.data[::-1] if oa else a.data
    bdata = b.data[::-1] if ob else b.data
    data = adata + bdata[k:]
    consumers = _embed(a.consumers, len(a.data), 0, oa)
    consumers += _embed(b.consumers, len(b.data), len(adata) - k, ob)
    merged = _Item(data, consumers, max(a.drift, b.drift))
    return merged


def _absorb_contained(items: list[_Item], at: int, reverse: bool) -> None:
    """After a merge, swallow any other segment now contained in items[at]."""
    host = items[at]
    kept: list[_Item] = []
    for idx, other in enumerate(items):
        if idx == at:
            kept.append(other)
            continue
        pos = host.data.find(other.data)
        if pos >= 0:
            host.consumers.extend(_embed(other.consumers, len(other.data), pos, False))
            host.drift = max(host.drift, other.drift)
            continue
        if reverse and other.reversible():
            pos = host.data.find(other.data[::-1])
            if pos >= 0:
                host.consumers.extend(_embed(other.consumers, len(other.data), pos, True))
                host.drift = max(host.drift, other.drift)
                continue
        kept.append(other)
    items[:] = kept


def _assemble(items: list[_Item]) -> CompactionResult:
    compacted = b"".join(it.data for it in items)
    placements: list[PlacementEntry] = []
    base = 0
    for it in items:
        for c in it.consumers:
            placements.append(PlacementEntry(c.row, base + c.offset, c.size, c.reversed))
        base += len(it.data)
    return CompactionResult(compacted=compacted, placements=placements)


def greedy_compact(
    segments,
    strategy: TieStrategy = TieStrategy.FIRST,
    seed: int | None = 0,
    *,
    reverse: bool = False,
    parallel: bool = False,
    rng: random.Random | None = None,
) -> CompactionResult:
    """Repeatedly merge the pair of segments with the largest overlap until
    no overlap is left, then concatenate the remainder in list order.

    Ties among maximal-overlap ordered pairs are broken by `strategy` over
    the row-major (i, j) enumeration of the current list: FIRST keeps the
    earliest pair, LAST the latest, RANDOM draws uniformly with the seeded
    generator. The merged segment takes the earlier position of the pair,
    and any segment newly contained in it is absorbed on the spot.
    """
    if not segments:
        raise ValueError("empty segment list")
    if rng is None:
        rng = random.Random(seed)
    items = [_Item(s.data, s.consumers, s.drift) for s in segments]
    cache: dict[tuple[int, int], tuple[int, bool, bool]] = {}
    rev_cache: dict[int, bytes | None] = {}
    pool = ThreadPoolExecutor(max_workers=4) if parallel and len(items) > 2 else None
    try:
        while len(items) > 1:
            n = len(items)
            pending = [
                (i, j)
                for i in range(n)
                for j in range(n)
                if i != j and (items[i].sid, items[j].sid) not in cache
            ]
            if pool is not None and len(pending) > 8:
                def job(pair):
                    i, j = pair
                    return _best_orientation(items[i], items[j], reverse, rev_cache)

                for (i, j), res in zip(pending, pool.map(job, pending)):
                    cache[(items[i].sid, items[j].sid)] = res
            else:
                for i, j in pending:
                    cache[(items[i].sid, items[j].sid)] = _best_orientation(
                        items[i], items[j], reverse, rev_cache
                    )

            best_k = 0
            best = None
            candidates: list[tuple[int, int, bool, bool]] = []
            for i in range(n):
                for j in range(n):
                    if i == j:
                        continue
                    k, oa, ob = cache[(items[i].sid, items[j].sid)]
                    if k == 0:
                        continue
                    if k > best_k:
                        best_k = k
                        best = (i, j, oa, ob)
                        candidates = [best]
                    elif k == best_k:
                        if strategy is TieStrategy.LAST:
                            best = (i, j, oa, ob)
                        elif strategy is TieStrategy.RANDOM:
                            candidates.append((i, j, oa, ob))
            if best is None:
                break
            if strategy is TieStrategy.RANDOM:
                best = candidates[rng.randrange(len(candidates))]
            i, j, oa, ob = best
            merged = _merge_items(items[i], oa, items[j], ob, best_k)
            lo, hi = (i, j) if i < j else (j, i)
            items[lo] = merged
            del items[hi]
            _absorb_contained(items, lo, reverse)
    finally:
        if pool is not None:
            pool.shutdown(wait=True)
    return _assemble(items)


def alignment_distance(a: bytes, b: bytes) -> tuple[float, int]:
    """Minimal mean absolute byte difference of the shorter string against
    every window of the longer one, with the offset achieving it (lowest
    offset wins ties)."""
    short, long_ = (a, b) if len(a) <= len(b) else (b, a)
    n = len(short)
    best = None
    best_off = 0
    for off in range(len(long_) - n + 1):
        d = sum(abs(short[t] - long_[off + t]) for t in range(n)) / n
        if best is None or d < best:
            best, best_off = d, off
    return best, best_off


def lossy_merge(segments, threshold: float, log: list[LossyMergeRecord] | None = None) -> list[Segment]:
    """Merge pairs of similar segments by per-position arithmetic mean.

    A pair qualifies when the minimal alignment distance of the shorter
    inside the longer is strictly below `threshold`. Scanning goes in list
    order and restarts after each merge; only segments whose rows are all
    one byte wide participate. Mean bytes round half away from zero. Each
    merge appends a LossyMergeRecord to `log` (when given) and accumulates
    the introduced per-byte drift on the merged segment.
    """
    if threshold is None or threshold < 0:
        raise ValueError("threshold must be a nonnegative number")
    items = [_Item(s.data, s.consumers, s.drift) for s in segments]
    while True:
        found = None
        n = len(items)
        for i in range(n):
            if not items[i].reversible():
                continue
            for j in range(i + 1, n):
                if not items[j].reversible():
                    continue
                dist, off = alignment_distance(items[i].data, items[j].data)
                if dist < threshold:
                    found = (i, j, dist, off)
                    break
            if found:
                break
        if not found:
            break
        i, j, dist, off = found
        a, b = items[i], items[j]
        long_item, short_item = (a, b) if len(a.data) >= len(b.data) else (b, a)
        ldata, sdata = long_item.data, short_item.data
        window = bytes((ldata[off + t] + sdata[t] + 1) // 2 for t in range(len(sdata)))
        drift_introduced = max(
            (max(abs(window[t] - ldata[off + t]), abs(window[t] - sdata[t])) for t in range(len(sdata))),
            default=0,
        )
        merged = _Item(
            ldata[:off] + window + ldata[off + len(sdata) :],
            list(long_item.consumers) + _embed(short_item.consumers, len(sdata), off, False),
            max(long_item.drift, short_item.drift) + drift_introduced,
        )
        if log is not None:
            log.append(
                LossyMergeRecord(dist, threshold, off, len(sdata), len(ldata), drift_introduced)
            )
        items[i] = merged
        del items[j]
    return [it.to_segment() for it in items]


def _find_window(decl: MappingDecl, src_vals, tgt_vals) -> int:
    """Element offset of the first window where f(source) equals the target."""
    m, n = len(src_vals), len(tgt_vals)
    deepest = 0
    for w in range(0, m - n + 1):
        ok = True
        for i in range(n):
            if decl.apply(src_vals[w + i]) != tgt_vals[i]:
                deepest = max(deepest, i)
                ok = False
                break
        if ok:
            return w
    raise MappingError(
        f"mapping '{decl.source}'->'{decl.target}' does not hold:"
        f" first mismatching index {deepest}"
    )


def apply_mappings(segments, mappings, arrays, p: PlatformConfig):
    """Resolve declared mappings: each target's rows leave the segment set
    and become accessors over the source row. Fails loudly when a declared
    map does not reproduce the target."""
    by_name = {a.name: a for a in arrays}
    accessors: list[MappingAccessor] = []
    dropped: set[str] = set()
    for decl in mappings:
        src, tgt = by_name[decl.source], by_name[decl.target]
        accessors.append(MappingAccessor(decl, _find_window(decl, src.data, tgt.data)))
        dropped.add(tgt.name)
    out: list[Segment] = []
    for seg in segments:
        kept = tuple(c for c in seg.consumers if c.row.array not in dropped)
        if kept:
            out.append(Segment(seg.data, kept, seg.drift))
    return out, accessors


def _snapshot_rows(segments):
    """Record the committed bytes (and drift bound) of every row; later
    stages relocate bytes but must never change them."""
    rows: dict[tuple[str, tuple[int, ...]], bytes] = {}
    drift: dict[tuple[str, tuple[int, ...]], float] = {}
    for seg in segments:
        for c in seg.consumers:
            content = seg.data[c.offset : c.offset + c.size]
            if c.reversed:
                content = content[::-1]
            key = (c.row.array, c.row.indices)
            rows[key] = content
            drift[key] = seg.drift
    return rows, drift


def run_pipeline(
    segments,
    options: CompactionOptions,
    *,
    mappings=(),
    arrays=(),
    platform: PlatformConfig | None = None,
    parallel: bool = False,
) -> CompactionResult:
    """Apply the enabled methods in fixed order: mapping, lossy, sub-array
    removal, greedy merging. The reverse method switches the removal and
    greedy passes to orientation-aware candidate generation. Without the
    greedy method, survivors are concatenated in order."""
    methods = set(options.methods)
    if not methods:
        raise ValueError("options.methods must not be empty")
    reverse = CompactionMethod.REVERSE in methods
    times: dict[str, float] = {}
    segs = list(segments)
    accessors: list[MappingAccessor] = []
    merges: list[LossyMergeRecord] = []

    if CompactionMethod.MAPPING in methods and mappings:
        t0 = time.perf_counter()
        segs, accessors = apply_mappings(segs, mappings, arrays, platform)
        times["mapping"] = (time.perf_counter() - t0) * 1000.0
    if CompactionMethod.LOSSY in methods:
        t0 = time.perf_counter()
        segs = lossy_merge(segs, options.lossy_threshold, log=merges)
        times["lossy"] = (time.perf_counter() - t0) * 1000.0

    expected_rows, row_drift = _snapshot_rows(segs)

    if CompactionMethod.REMOVE_SUBARRAYS in methods:
        t0 = time.perf_counter()
        segs = remove_subarrays(segs, reverse=reverse)
        times["remove_subarrays"] = (time.perf_counter() - t0) * 1000.0
    if CompactionMethod.GREEDY in methods and segs:
        t0 = time.perf_counter()
        result = greedy_compact(
            segs,
            options.tie_strategy,
            options.seed,
            reverse=reverse,
            parallel=parallel,
        )
        times["greedy"] = (time.perf_counter() - t0) * 1000.0
    else:
        result = _assemble([_Item(s.data, s.consumers, s.drift) for s in segs])

    result.accessors = accessors
    result.expected_rows = expected_rows
    result.row_drift = row_drift
    result.merges = merges
    result.stage_times_ms = times
    for spec in arrays:
        for idx in spec.null_nodes():
            result.placements.append(PlacementEntry(RowPath(spec.name, idx), None))
    return result


def compact_model(spec, *, parallel: bool = False) -> CompactionResult:
    """Flatten a parsed spec and run its configured pipeline."""
    segments = flatten(spec.arrays, spec.platform)
    return run_pipeline(
        segments,
        spec.options,
        mappings=spec.mappings,
        arrays=spec.arrays,
        platform=spec.platform,
        parallel=parallel,
    )


def brute_force_superstring(items) -> bytes:
    """Exact shortest superstring by exhaustive permutation search.

    Exponential; refuses instances beyond 6 strings of 8 bytes. After
    dropping strings contained in others, every ordering is merged with
    maximal pairwise overlaps, which is exact for containment-free sets.
    """
    strs = [bytes(s) for s in items]
    if not strs:
        raise ValueError("empty instance")
    if len(strs) > 6 or any(len(s) > 8 for s in strs):
        raise OracleLimitError(
            f"instance too large: {len(strs)} strings,"
            f" max length {max(len(s) for s in strs)}"
        )
    core: list[bytes] = []
    for i, s in enumerate(strs):
        contained = any(
            j != i and s in t and (len(t) > len(s) or j < i) for j, t in enumerate(strs)
        )
        if not contained:
            core.append(s)
    best: bytes | None = None
    for perm in itertools.permutations(core):
        cur = perm[0]
        for nxt in perm[1:]:
            cur = cur + nxt[overlap_len(cur, nxt) :]
            if best is not None and len(cur) >= len(best):
                break
        if best is None or len(cur) < len(best):
            best = cur
    return best
