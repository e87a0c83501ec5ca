"""compactor: pack read-only typed arrays into one shared byte array and
emit C code that reads the data through pointers, with no decompression."""

from .codegen import (
    CodegenError,
    EmitOptions,
    VerificationError,
    emit_compacted,
    emit_reference,
    pointer_slot_count,
    verify_placements,
)
from .compact import (
    CompactionResult,
    MappingAccessor,
    MappingError,
    OracleLimitError,
    PlacementEntry,
    alignment_distance,
    apply_mappings,
    brute_force_superstring,
    compact_model,
    greedy_compact,
    lossy_merge,
    overlap_len,
    remove_subarrays,
    run_pipeline,
)
from .harness import HarnessBundle, emit_harness, write_bundle
from .model import (
    ArraySpec,
    CompactionMethod,
    CompactionOptions,
    ElementType,
    Endianness,
    MappingDecl,
    ParsedSpec,
    PlatformConfig,
    ScalarSpec,
    SpecError,
    TieStrategy,
    parse_spec,
    serialize_spec,
    validate_mapping_decls,
)
from .report import CompactionReport, build_report, ratio_percent
from .transform import (
    Consumer,
    RowPath,
    Segment,
    decode_row,
    decode_scalar,
    encode_row,
    encode_scalar,
    flatten,
    input_size_bytes,
)

__all__ = [
    "ArraySpec",
    "CodegenError",
    "CompactionMethod",
    "CompactionOptions",
    "CompactionReport",
    "CompactionResult",
    "Consumer",
    "ElementType",
    "EmitOptions",
    "Endianness",
    "HarnessBundle",
    "MappingAccessor",
    "MappingDecl",
    "MappingError",
    "OracleLimitError",
    "ParsedSpec",
    "PlacementEntry",
    "PlatformConfig",
    "RowPath",
    "ScalarSpec",
    "Segment",
    "SpecError",
    "TieStrategy",
    "VerificationError",
    "alignment_distance",
    "apply_mappings",
    "brute_force_superstring",
    "build_report",
    "compact_model",
    "decode_row",
    "decode_scalar",
    "emit_compacted",
    "emit_harness",
    "emit_reference",
    "encode_row",
    "encode_scalar",
    "flatten",
    "greedy_compact",
    "input_size_bytes",
    "lossy_merge",
    "overlap_len",
    "parse_spec",
    "pointer_slot_count",
    "ratio_percent",
    "remove_subarrays",
    "run_pipeline",
    "serialize_spec",
    "validate_mapping_decls",
    "verify_placements",
    "write_bundle",
]
