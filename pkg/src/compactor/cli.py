"""Command-line front end: compact, oracle, probe-split, harness."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from pathlib import Path

from .codegen import (
    CodegenError,
    EmitOptions,
    VerificationError,
    emit_compacted,
    emit_reference,
    verify_placements,
)
from .compact import (
    MappingError,
    OracleLimitError,
    brute_force_superstring,
    greedy_compact,
    remove_subarrays,
    run_pipeline,
)
from .harness import emit_harness, write_bundle
from .model import (
    CompactionMethod,
    ParsedSpec,
    SpecError,
    TieStrategy,
    parse_spec,
)
from .report import build_report
from .transform import Consumer, RowPath, Segment, flatten

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_SPEC = 2
EXIT_IO = 3


def _load_spec(path: str) -> tuple[ParsedSpec, float]:
    t0 = time.perf_counter()
    text = Path(path).read_text()
    spec = parse_spec(text)
    return spec, (time.perf_counter() - t0) * 1000.0


def _apply_overrides(spec: ParsedSpec, args) -> ParsedSpec:
    opts = spec.options
    changes = {}
    if args.methods:
        try:
            changes["methods"] = tuple(
                CompactionMethod(m.strip()) for m in args.methods.split(",") if m.strip()
            )
        except ValueError as e:
            raise SpecError(f"unknown method ({e})") from None
    if args.strategy:
        changes["tie_strategy"] = TieStrategy(args.strategy)
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.lossy_threshold is not None:
        changes["lossy_threshold"] = args.lossy_threshold
    if args.var_name:
        changes["var_name"] = args.var_name
    if args.static:
        changes["emit_static"] = True
    if args.const:
        changes["emit_const"] = True
    if changes:
        opts = dataclasses.replace(opts, **changes)
    return dataclasses.replace(spec, options=opts)


def _emit_options(spec: ParsedSpec) -> EmitOptions:
    return EmitOptions(
        var_name=spec.options.var_name,
        emit_static=spec.options.emit_static,
        emit_const=spec.options.emit_const,
    )


def _compact_spec(spec: ParsedSpec, parallel: bool):
    """Shared flatten/pipeline/verify path; returns (result, phase times)."""
    times = {}
    t0 = time.perf_counter()
    segments = flatten(spec.arrays, spec.platform)
    times["transform"] = (time.perf_counter() - t0) * 1000.0
    result = run_pipeline(
        segments,
        spec.options,
        mappings=spec.mappings,
        arrays=spec.arrays,
        platform=spec.platform,
        parallel=parallel,
    )
    t0 = time.perf_counter()
    verify_placements(result, spec.arrays, spec.platform)
    times["verify"] = (time.perf_counter() - t0) * 1000.0
    return result, times


def cmd_compact(args) -> int:
    spec, parse_ms = _load_spec(args.input)
    spec = _apply_overrides(spec, args)
    times = {"parse": parse_ms}
    result, more = _compact_spec(spec, args.parallel)
    times.update(more)

    t0 = time.perf_counter()
    emit_opts = _emit_options(spec)
    compacted_src = emit_compacted(result, spec.arrays, spec.scalars, spec.platform, emit_opts)
    reference_src = emit_reference(spec.arrays, spec.scalars, emit_opts) if args.reference else None
    times["codegen"] = (time.perf_counter() - t0) * 1000.0

    report = build_report(
        spec.arrays, result, spec.platform, spec.options,
        extra_times_ms=times, comparisons=spec.comparisons,
    )
    Path(args.out).write_text(compacted_src)
    if args.reference:
        Path(args.reference).write_text(reference_src)
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    print(
        f"compacted {report.input_bytes} -> {report.output_bytes} bytes"
        f" ({report.ratio_percent}%), pointer overhead {report.pointer_overhead_bytes} bytes"
    )
    return EXIT_OK


def cmd_oracle(args) -> int:
    spec, _ = _load_spec(args.input)
    segments = remove_subarrays(flatten(spec.arrays, spec.platform))
    greedy = greedy_compact(segments, spec.options.tie_strategy, spec.options.seed)
    optimal = brute_force_superstring([s.data for s in segments])
    ratio = len(greedy.compacted) / len(optimal) if optimal else 1.0
    print(f"greedy_bytes={len(greedy.compacted)}")
    print(f"optimal_bytes={len(optimal)}")
    print(f"ratio={ratio:.2f}")
    return EXIT_OK


def split_segments(segments, parts: int) -> list[Segment]:
    """Cut every segment of at least 2*parts bytes into `parts` near-equal
    pieces (synthetic consumers; the probe only measures sizes)."""
    if parts < 2:
        raise ValueError("parts must be >= 2")
    out: list[Segment] = []
    for seg in segments:
        n = len(seg.data)
        if n < 2 * parts:
            out.append(seg)
            continue
        base, rem = divmod(n, parts)
        start = 0
        for k in range(parts):
            size = base + (1 if k < rem else 0)
            piece = seg.data[start : start + size]
            row = RowPath(f"{seg.consumers[0].row.array}__part{k}", seg.consumers[0].row.indices)
            out.append(Segment(piece, (Consumer(row, 0, len(piece), False, 1),)))
            start += size
    return out


def probe_split(segments, parts: int) -> int:
    """Achievable compacted size after splitting; informational only, no
    placements or code come out of it."""
    pieces = split_segments(segments, parts)
    survivors = remove_subarrays(pieces)
    return len(greedy_compact(survivors).compacted)


def cmd_probe_split(args) -> int:
    spec, _ = _load_spec(args.input)
    segments = flatten(spec.arrays, spec.platform)
    if not segments:
        print("unsplit_bytes=0")
        print("probe_bytes=0")
        return EXIT_OK
    unsplit = len(greedy_compact(remove_subarrays(segments)).compacted)
    probe = probe_split(segments, args.parts)
    print(f"unsplit_bytes={unsplit}")
    print(f"probe_bytes={probe}")
    return EXIT_OK


def cmd_harness(args) -> int:
    spec, _ = _load_spec(args.input)
    result, _ = _compact_spec(spec, parallel=False)
    bundle = emit_harness(spec.arrays, spec.scalars, result, spec.platform, _emit_options(spec))
    written = write_bundle(bundle, args.out_dir)
    for path in written:
        print(path)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compactor",
        description="Pack read-only typed arrays into one byte array plus pointer tables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compact", help="compact a spec and emit C source")
    p.add_argument("--input", required=True, help="spec file (JSON)")
    p.add_argument("--out", required=True, help="compacted C output path")
    p.add_argument("--reference", help="also write the uncompacted reference unit")
    p.add_argument("--report", help="write a JSON report")
    p.add_argument("--methods", help="comma-separated method override")
    p.add_argument("--strategy", choices=[s.value for s in TieStrategy])
    p.add_argument("--seed", type=int)
    p.add_argument("--lossy-threshold", type=float, dest="lossy_threshold")
    p.add_argument("--var-name", dest="var_name")
    p.add_argument("--static", action="store_true", default=False)
    p.add_argument("--const", action="store_true", default=False)
    p.add_argument("--parallel", action="store_true", default=False)
    p.set_defaults(func=cmd_compact)

    p = sub.add_parser("oracle", help="compare greedy result against the exact optimum")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("probe-split", help="estimate the gain from splitting long segments")
    p.add_argument("--input", required=True)
    p.add_argument("--parts", type=int, required=True)
    p.set_defaults(func=cmd_probe_split)

    p = sub.add_parser("harness", help="write differential C test fixtures")
    p.add_argument("--input", required=True)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.set_defaults(func=cmd_harness)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, MappingError, OracleLimitError, CodegenError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SPEC
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFY
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
