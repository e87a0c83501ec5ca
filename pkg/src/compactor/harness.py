"""Differential test fixtures in C: a generated main that dumps every array
element (NULL-aware), compiled once against the reference unit and once
against the compacted unit so an external driver can diff the outputs."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

from .codegen import (
    EmitOptions,
    array_styles,
    emit_compacted,
    emit_reference,
    final_row_values,
)
from .compact import CompactionResult
from .model import ElementType, PlatformConfig


@dataclass(frozen=True)
class HarnessBundle:
    reference_unit: str
    compacted_unit: str
    main_ref_unit: str
    main_cmp_unit: str
    expected_dump: str


BUNDLE_FILES = ("reference.c", "compacted.c", "main_ref.c", "main_cmp.c", "expected.txt")


def _print_stmt(t: ElementType, expr: str) -> str:
    if t.signed:
        return f'    printf(" %d", (int)({expr}));'
    return f'    printf(" %u", (unsigned)({expr}));'


def _access_expr(a, style: str, indices, z: int) -> str:
    args = ", ".join(str(v) for v in indices + (z,))
    if style in ("mapped", "macro"):
        return f"{a.name}_GET({args})"
    return a.name + "".join(f"[{v}]" for v in indices + (z,))


def _main_body(arrays, scalars, result: CompactionResult, platform: PlatformConfig) -> str:
    styles = array_styles(arrays, result)
    mapped = {acc.decl.target for acc in result.accessors}
    expected_first_byte = 1 if platform.endianness.value == "little" else 0
    lines = [
        "/* Dumps every declared value, one line per name; compiled against",
        " * both the reference and the compacted data unit, the output must",
        " * be byte-identical. */",
        "",
        f"typedef char host_int_width_check[(sizeof(int) == {platform.int_bytes}) ? 1 : -1];",
        "",
        "static int host_byte_order_matches(void)",
        "{",
        "    unsigned int probe = 1U;",
        f"    return *(const unsigned char *)&probe == {expected_first_byte};",
        "}",
        "",
        "int main(void)",
        "{",
        "    if (!host_byte_order_matches()) {",
        '        fprintf(stderr, "host byte order does not match the generated data\\n");',
        "        return 2;",
        "    }",
    ]
    for s in scalars:
        fmt = "%d" if s.elem_type.signed else "%u"
        cast = "(int)" if s.elem_type.signed else "(unsigned)"
        lines.append(f'    printf("{s.name}: {fmt}\\n", {cast}{s.name});')
    for a in arrays:
        style = styles[a.name]
        lines.append(f'    printf("{a.name}:");')
        if a.name in mapped:
            for z in range(a.dims[0]):
                lines.append(_print_stmt(a.elem_type, _access_expr(a, style, (), z)))
        elif a.data is None:
            lines.append('    printf(" NULL");')
        else:
            for indices in itertools.product(*map(range, a.dims[:-1])):
                node = a.data
                absent_at = None
                for depth, i in enumerate(indices):
                    if node is None:
                        absent_at = indices[:depth]
                        break
                    node = node[i]
                if node is None and absent_at is None:
                    absent_at = indices
                if absent_at is not None:
                    # one NULL token per absent sub-tree, emitted at its first row
                    if all(v == 0 for v in indices[len(absent_at) :]):
                        lines.append('    printf(" NULL");')
                    continue
                for z in range(a.dims[-1]):
                    lines.append(_print_stmt(a.elem_type, _access_expr(a, style, indices, z)))
        lines.append('    printf("\\n");')
    lines.append("    return 0;")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _expected_dump(arrays, scalars, result: CompactionResult, platform: PlatformConfig) -> str:
    by_name = {a.name: a for a in arrays}
    mapped = {acc.decl.target for acc in result.accessors}
    lines = [f"{s.name}: {s.value}" for s in scalars]
    for a in arrays:
        tokens: list[str] = []
        if a.name in mapped:
            tokens = [str(v) for v in final_row_values(result, by_name, platform, a.name, ())]
        else:

            def walk(node, idx, depth):
                if node is None:
                    tokens.append("NULL")
                    return
                if depth == a.ndims - 1:
                    values = final_row_values(result, by_name, platform, a.name, idx)
                    tokens.extend(str(v) for v in values)
                    return
                for i, child in enumerate(node):
                    walk(child, idx + (i,), depth + 1)

            walk(a.data, (), 0)
        lines.append(f"{a.name}: {' '.join(tokens)}".rstrip())
    return "\n".join(lines) + "\n"


def emit_harness(
    arrays,
    scalars,
    result: CompactionResult,
    platform: PlatformConfig,
    opts: EmitOptions,
) -> HarnessBundle:
    """Build all five fixture texts. The two mains share an identical body
    and differ only in which data unit they include, which is the point:
    access syntax is the same for compacted and uncompacted data."""
    styles = array_styles(arrays, result)
    passthrough = sorted(n for n, s in styles.items() if s in ("mapped", "macro"))
    reference = emit_reference(arrays, scalars, opts, get_macros=passthrough)
    compacted = emit_compacted(result, arrays, scalars, platform, opts)
    body = _main_body(arrays, scalars, result, platform)
    main_ref = '#include <stdio.h>\n#include "reference.c"\n\n' + body
    main_cmp = '#include <stdio.h>\n#include "compacted.c"\n\n' + body
    return HarnessBundle(
        reference_unit=reference,
        compacted_unit=compacted,
        main_ref_unit=main_ref,
        main_cmp_unit=main_cmp,
        expected_dump=_expected_dump(arrays, scalars, result, platform),
    )


def write_bundle(bundle: HarnessBundle, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    contents = (
        bundle.reference_unit,
        bundle.compacted_unit,
        bundle.main_ref_unit,
        bundle.main_cmp_unit,
        bundle.expected_dump,
    )
    written = []
    for name, text in zip(BUNDLE_FILES, contents):
        path = out / name
        path.write_text(text)
        written.append(path)
    return written
