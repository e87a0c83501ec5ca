"""C source emission: the compacted byte array with typed pointer tables,
the plain (uncompacted) reference version, and an in-memory placement
verifier that needs no compiler."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .compact import CompactionResult
from .model import ArraySpec, ElementType, PlatformConfig, ScalarSpec
from .transform import decode_row, encode_row


class CodegenError(ValueError):
    """Emission cannot proceed (name collision, inconsistent placements)."""


class VerificationError(Exception):
    """A placement does not reproduce the expected row content."""


@dataclass(frozen=True)
class EmitOptions:
    var_name: str = "c"
    emit_static: bool = False
    emit_const: bool = True
    null_macro: bool = True


_HEADER = """\
/*
 * Generated read-only data. All arrays share the single byte array below
 * and are exposed as typed pointers into it, so using them costs nothing
 * beyond one pointer indirection.
 *
 * Notes for code consuming these declarations:
 *  - Replaced arrays are pointers, and multi-dimensional data is NOT
 *    contiguous: never index across row boundaries, never memcpy a whole
 *    multi-dimensional array, and do not rely on sizeof() of a name below
 *    matching the original array extent.
 *  - The address-of operator now yields pointer addresses, so functions
 *    expecting true array arguments cannot be used with these names.
 *  - Rows may alias and overlap each other inside the shared array.
 */
"""

_NULL_GUARD = "#ifndef NULL\n#define NULL 0\n#endif\n"

_BYTES_PER_LINE = 16


def array_styles(arrays, result: CompactionResult) -> dict[str, str]:
    """How each array is expressed in C: 'pointer' tables, a '_GET' `macro`
    (some row stored reversed), or 'mapped' (computed from another array)."""
    mapped = {acc.decl.target for acc in result.accessors}
    by_row = result.by_row()
    styles: dict[str, str] = {}
    for a in arrays:
        if a.name in mapped:
            styles[a.name] = "mapped"
            continue
        reversed_any = False
        for idx, _ in a.rows():
            entry = by_row.get((a.name, idx))
            if entry is not None and entry.offset is not None and entry.reversed:
                reversed_any = True
                break
        styles[a.name] = "macro" if reversed_any else "pointer"
    return styles


def _qualifier(opts: EmitOptions) -> str:
    return ("static " if opts.emit_static else "") + ("const " if opts.emit_const else "")


def _fmt_idx(indices) -> str:
    return "".join(f"[{i}]" for i in indices)


def _render_byte_array(var: str, data: bytes, opts: EmitOptions) -> str:
    qual = _qualifier(opts)
    values = [str(b) for b in data]
    if len(values) <= _BYTES_PER_LINE:
        return f"{qual}unsigned char {var}[{len(data)}] = {{{','.join(values)}}};"
    lines = [
        ",".join(values[i : i + _BYTES_PER_LINE])
        for i in range(0, len(values), _BYTES_PER_LINE)
    ]
    body = ",\n    ".join(lines)
    return f"{qual}unsigned char {var}[{len(data)}] = {{\n    {body}\n}};"


def _scalar_decl(s: ScalarSpec, opts: EmitOptions) -> str:
    return f"{_qualifier(opts)}{s.elem_type.ctype} {s.name} = {s.value};"


def _elem_read(var: str, t: ElementType, index_expr: str) -> str:
    base = f"{var}[{index_expr}]"
    if t is ElementType.SCHAR:
        return f"((signed char){base})"
    return f"({base})"


def _macro_args(ndims: int) -> str:
    return ", ".join("ijk"[:ndims])


def _get_macro(a: ArraySpec, by_row, var: str) -> str:
    """Accessor macro for an array with reversed rows (one-byte elements):
    plain pointers cannot invert indices, so subscripts become arithmetic
    on the shared byte array."""
    last = "ijk"[a.ndims - 1]
    row_exprs: list[tuple[tuple[int, ...], str]] = []
    for idx in itertools.product(*map(range, a.dims[:-1])):
        entry = by_row.get((a.name, idx))
        if entry is None or entry.offset is None:
            row_exprs.append((idx, "(0)"))  # absent row, never accessed
            continue
        if entry.reversed:
            expr = _elem_read(var, a.elem_type, f"{entry.offset + entry.size - 1} - ({last})")
        else:
            expr = _elem_read(var, a.elem_type, f"{entry.offset} + ({last})")
        row_exprs.append((idx, expr))
    chain = row_exprs[-1][1]
    for idx, expr in reversed(row_exprs[:-1]):
        cond = " && ".join(f"({'ijk'[d]}) == {v}" for d, v in enumerate(idx))
        chain = f"{cond} ? {expr} : {chain}"
    return (
        f"/* rows of '{a.name}' are stored reversed; subscript syntax is not\n"
        f" * preserved, access elements through {a.name}_GET */\n"
        f"#define {a.name}_GET({_macro_args(a.ndims)}) ({chain})"
    )


def _mapped_macro(a: ArraySpec, accessor, styles, by_row, var: str) -> str:
    decl = accessor.decl
    shift = f"(i) + {accessor.source_elem_offset}"
    if styles[decl.source] == "pointer":
        src_expr = f"{decl.source}[{shift}]"
    else:
        src_expr = f"{decl.source}_GET({shift})"
    return (
        f"/* '{a.name}' is computed from '{decl.source}'; subscript syntax is\n"
        f" * not preserved, access elements through {a.name}_GET */\n"
        f"#define {a.name}_GET(i) ((({src_expr}) * ({decl.num})) / ({decl.den}) + ({decl.add}))"
    )


def emit_compacted(
    result: CompactionResult,
    arrays,
    scalars,
    platform: PlatformConfig,
    opts: EmitOptions,
) -> str:
    """Render the compacted translation unit: shared byte array, scalars,
    and one declaration (pointer table or accessor macro) per input array."""
    names = {a.name for a in arrays} | {s.name for s in scalars}
    if opts.var_name in names:
        raise CodegenError(f"variable name '{opts.var_name}' collides with a declared name")
    by_row = result.by_row()
    styles = array_styles(arrays, result)
    accessors = {acc.decl.target: acc for acc in result.accessors}
    qual = _qualifier(opts)
    cast_const = "const " if opts.emit_const else ""
    var = opts.var_name
    total = len(result.compacted)
    null_used = False

    def ptr(a: ArraySpec, indices) -> str:
        nonlocal null_used
        entry = by_row.get((a.name, indices))
        if entry is None or entry.offset is None:
            null_used = True
            return "NULL"
        if entry.offset + entry.size > total:
            raise CodegenError(
                f"internal error: placement of {a.name}{_fmt_idx(indices)} is out of bounds"
            )
        return f"({cast_const}{a.elem_type.ctype}*)&{var}[{entry.offset}]"

    decls: list[str] = []
    for a in arrays:
        style = styles[a.name]
        if style == "mapped":
            decls.append(_mapped_macro(a, accessors[a.name], styles, by_row, var))
            continue
        if style == "macro":
            decls.append(_get_macro(a, by_row, var))
            continue
        ct = a.elem_type.ctype
        if a.data is None:
            null_used = True
            decls.append(f"{qual}{ct} {'*' * a.ndims}{a.name} = NULL;")
        elif a.ndims == 1:
            decls.append(f"{qual}{ct} *{a.name} = {ptr(a, ())};")
        elif a.ndims == 2:
            entries = ",".join(ptr(a, (i,)) for i in range(a.dims[0]))
            decls.append(f"{qual}{ct} *{a.name}[{a.dims[0]}] = {{{entries}}};")
        else:
            tops: list[str] = []
            for i, plane in enumerate(a.data):
                if plane is None:
                    null_used = True
                    tops.append("NULL")
                    continue
                plane_name = f"{a.name}{i}"
                if plane_name in names:
                    raise CodegenError(
                        f"generated name '{plane_name}' collides with a declared name"
                    )
                entries = ",".join(ptr(a, (i, j)) for j in range(a.dims[1]))
                decls.append(f"{qual}{ct} *{plane_name}[{a.dims[1]}] = {{{entries}}};")
                tops.append(plane_name)
            decls.append(f"{qual}{ct} **{a.name}[{a.dims[0]}] = {{{','.join(tops)}}};")

    parts = [_HEADER]
    if null_used and opts.null_macro:
        parts.append(_NULL_GUARD)
    if total:
        parts.append(_render_byte_array(var, result.compacted, opts))
    for s in scalars:
        parts.append(_scalar_decl(s, opts))
    parts.extend(decls)
    return "\n".join(parts) + "\n"


def _render_values(node) -> str:
    if isinstance(node, int):
        return str(node)
    return "{" + ",".join(_render_values(c) for c in node) + "}"


def emit_reference(arrays, scalars, opts: EmitOptions, get_macros=()) -> str:
    """Render the uncompacted translation unit: plain array declarations
    reproducing the input. Arrays containing NULL sub-trees are emitted in
    pointer form, since plain initializers cannot express absent rows.
    `get_macros` names arrays that additionally get a pass-through _GET
    macro, keeping call sites identical to the compacted unit."""
    names = {a.name for a in arrays} | {s.name for s in scalars}
    qual = _qualifier(opts)
    null_used = False
    decls: list[str] = []

    for a in arrays:
        ct = a.elem_type.ctype
        has_null = next(a.null_nodes(), None) is not None
        if not has_null:
            dims = "".join(f"[{d}]" for d in a.dims)
            decls.append(f"{qual}{ct} {a.name}{dims} = {_render_values(a.data)};")
            continue
        null_used = True
        if a.data is None:
            decls.append(f"{qual}{ct} {'*' * a.ndims}{a.name} = NULL;")
            continue

        def backing(idx, values) -> str:
            row_name = f"{a.name}_{'_'.join(map(str, idx))}"
            if row_name in names:
                raise CodegenError(f"generated name '{row_name}' collides with a declared name")
            decls.append(f"{qual}{ct} {row_name}[{a.dims[-1]}] = {_render_values(values)};")
            return row_name

        if a.ndims == 2:
            entries = [
                "NULL" if row is None else backing((i,), row) for i, row in enumerate(a.data)
            ]
            decls.append(f"{qual}{ct} *{a.name}[{a.dims[0]}] = {{{','.join(entries)}}};")
        else:
            tops: list[str] = []
            for i, plane in enumerate(a.data):
                if plane is None:
                    tops.append("NULL")
                    continue
                plane_name = f"{a.name}{i}"
                if plane_name in names:
                    raise CodegenError(
                        f"generated name '{plane_name}' collides with a declared name"
                    )
                entries = [
                    "NULL" if row is None else backing((i, j), row)
                    for j, row in enumerate(plane)
                ]
                decls.append(f"{qual}{ct} *{plane_name}[{a.dims[1]}] = {{{','.join(entries)}}};")
                tops.append(plane_name)
            decls.append(f"{qual}{ct} **{a.name}[{a.dims[0]}] = {{{','.join(tops)}}};")

    by_name = {a.name: a for a in arrays}
    macro_lines = []
    for name in get_macros:
        a = by_name[name]
        subs = "".join(f"[({v})]" for v in "ijk"[: a.ndims])
        macro_lines.append(f"#define {name}_GET({_macro_args(a.ndims)}) ({name}{subs})")

    parts = ["/* Reference (uncompacted) read-only data. */\n"]
    if null_used and opts.null_macro:
        parts.append(_NULL_GUARD)
    for s in scalars:
        parts.append(_scalar_decl(s, opts))
    parts.extend(decls)
    parts.extend(macro_lines)
    return "\n".join(parts) + "\n"


def pointer_slot_count(arrays, result: CompactionResult) -> int:
    """Number of pointer variables/slots the compacted unit declares; the
    report multiplies this by the platform pointer width. NULL slots still
    occupy a pointer; macro-accessed arrays occupy none."""
    styles = array_styles(arrays, result)
    total = 0
    for a in arrays:
        if styles[a.name] != "pointer":
            continue
        if a.data is None or a.ndims == 1:
            total += 1
        elif a.ndims == 2:
            total += a.dims[0]
        else:
            total += a.dims[0]
            total += sum(a.dims[1] for plane in a.data if plane is not None)
    return total


def final_row_values(result, by_name, platform, name, indices):
    """Values a row holds after the pipeline: post-merge content when lossy
    ran, mapped rows computed from their (final) source."""
    spec = by_name[name]
    for acc in result.accessors:
        if acc.decl.target == name:
            src_vals = final_row_values(result, by_name, platform, acc.decl.source, ())
            w = acc.source_elem_offset
            return tuple(acc.decl.apply(v) for v in src_vals[w : w + spec.dims[0]])
    content = result.expected_rows.get((name, indices))
    if content is not None:
        return decode_row(content, spec.elem_type, platform)
    return tuple(spec.row_values(indices))


def verify_placements(result: CompactionResult, arrays, platform: PlatformConfig) -> None:
    """Check that decoding the compacted bytes at every placement reproduces
    the committed row content, and (for lossless runs) the original values.
    Mapped arrays are checked through their accessor. Raises
    VerificationError naming array, row path and element index."""
    by_row = result.by_row()
    by_name = {a.name: a for a in arrays}
    mapped = {acc.decl.target: acc for acc in result.accessors}
    lossless = not result.merges
    total = len(result.compacted)

    for spec in arrays:
        if spec.name in mapped:
            acc = mapped[spec.name]
            got = final_row_values(result, by_name, platform, spec.name, ())
            if lossless:
                want = tuple(spec.data)
                for i, (g, w) in enumerate(zip(got, want)):
                    if g != w:
                        raise VerificationError(
                            f"{spec.name}: element {i}: expected {w}, computed {g} via mapping"
                        )
            continue
        for indices, values in spec.rows():
            key = (spec.name, indices)
            entry = by_row.get(key)
            where = f"{spec.name}{_fmt_idx(indices)}"
            if entry is None or entry.offset is None:
                raise VerificationError(f"{where}: no placement recorded")
            if entry.offset + entry.size > total:
                raise VerificationError(f"{where}: placement out of bounds")
            chunk = result.compacted[entry.offset : entry.offset + entry.size]
            if entry.reversed:
                chunk = chunk[::-1]
            expected = result.expected_rows.get(key)
            if expected is None:
                expected = encode_row(values, spec.elem_type, platform)
            if chunk != expected:
                got_vals = decode_row(chunk, spec.elem_type, platform)
                want_vals = decode_row(expected, spec.elem_type, platform)
                for i, (g, w) in enumerate(zip(got_vals, want_vals)):
                    if g != w:
                        raise VerificationError(
                            f"{where}: element {i}: expected {w}, decoded {g}"
                        )
                raise VerificationError(f"{where}: content mismatch")
            if lossless:
                decoded = decode_row(chunk, spec.elem_type, platform)
                if decoded != tuple(values):
                    for i, (g, w) in enumerate(zip(decoded, values)):
                        if g != w:
                            raise VerificationError(
                                f"{where}: element {i}: expected {w}, decoded {g}"
                            )
