#!/usr/bin/env python3
"""Walk the bundled fixtures through the full pipeline and print what the
tool produces: sizes per method set, the report, and the emitted C."""

import dataclasses
import json
from pathlib import Path

from compactor import (
    CompactionMethod,
    EmitOptions,
    compact_model,
    emit_compacted,
    emit_reference,
    parse_spec,
    verify_placements,
)
from compactor.report import build_report

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def show(name: str, method_sets) -> None:
    spec = parse_spec((FIXTURES / name).read_text())
    print(f"=== {name} ===")
    for methods in method_sets:
        opts = dataclasses.replace(
            spec.options, methods=tuple(CompactionMethod(m) for m in methods)
        )
        run = dataclasses.replace(spec, options=opts)
        result = compact_model(run)
        verify_placements(result, run.arrays, run.platform)
        report = build_report(run.arrays, result, run.platform, run.options)
        print(
            f"  {'+'.join(methods):40s} {report.input_bytes:4d} -> {report.output_bytes:4d} bytes"
            f"  ({report.ratio_percent}%)  pointers +{report.pointer_overhead_bytes}B"
        )
    print()


def main() -> None:
    show("pair_demo.json", [["remove_subarrays"], ["remove_subarrays", "greedy"]])
    show(
        "mixed_types_3d.json",
        [
            ["remove_subarrays"],
            ["remove_subarrays", "greedy"],
            ["remove_subarrays", "greedy", "reverse"],
        ],
    )
    show("sparse_null.json", [["remove_subarrays", "greedy"]])

    spec = parse_spec((FIXTURES / "pair_demo.json").read_text())
    result = compact_model(spec)
    print("=== emitted C (pair_demo, compacted) ===")
    print(emit_compacted(result, spec.arrays, spec.scalars, spec.platform, EmitOptions()))
    print("=== emitted C (pair_demo, reference) ===")
    print(emit_reference(spec.arrays, spec.scalars, EmitOptions()))
    report = build_report(spec.arrays, result, spec.platform, spec.options)
    print("=== report ===")
    print(json.dumps(report.to_dict(), indent=2))


if __name__ == "__main__":
    main()
