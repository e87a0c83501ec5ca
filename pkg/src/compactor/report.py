"""Size and timing accounting for a compaction run."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .codegen import pointer_slot_count
from .compact import CompactionResult
from .model import CompactionOptions, PlatformConfig
from .transform import input_size_bytes


@dataclass
class CompactionReport:
    """Sizes count data bytes only (scalars excluded); pointer overhead is
    reported separately and folded into net_bytes, because the pointer
    tables can outweigh the savings on incompressible inputs."""

    input_bytes: int
    output_bytes: int
    ratio_percent: float
    pointer_overhead_bytes: int
    net_bytes: int
    phase_times_ms: dict[str, float] = field(default_factory=dict)
    method_list: list[str] = field(default_factory=list)
    comparisons: Any = None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "input_bytes": self.input_bytes,
            "output_bytes": self.output_bytes,
            "ratio_percent": self.ratio_percent,
            "pointer_overhead_bytes": self.pointer_overhead_bytes,
            "net_bytes": self.net_bytes,
            "phase_times_ms": self.phase_times_ms,
            "method_list": self.method_list,
        }
        if self.comparisons is not None:
            doc["comparisons"] = self.comparisons
        return doc


def ratio_percent(input_bytes: int, output_bytes: int) -> float:
    """Output as a percentage of input ("compressed to"), 2 decimals."""
    if input_bytes == 0:
        return 100.0
    return round(output_bytes / input_bytes * 100.0, 2)


def build_report(
    arrays,
    result: CompactionResult,
    platform: PlatformConfig,
    options: CompactionOptions,
    extra_times_ms: dict[str, float] | None = None,
    comparisons: Any = None,
) -> CompactionReport:
    inp = input_size_bytes(arrays, platform)
    out = len(result.compacted)
    overhead = pointer_slot_count(arrays, result) * platform.pointer_bytes
    times = dict(extra_times_ms or {})
    times.update(result.stage_times_ms)
    return CompactionReport(
        input_bytes=inp,
        output_bytes=out,
        ratio_percent=ratio_percent(inp, out),
        pointer_overhead_bytes=overhead,
        net_bytes=out + overhead,
        phase_times_ms={k: round(v, 2) for k, v in times.items()},
        method_list=[m.value for m in options.methods],
        comparisons=comparisons,
    )
