"""Platform encoding: turn typed multi-dimensional arrays into flat byte
segments, one per distinct row content, with back-references to every row
each segment serves."""

from __future__ import annotations

from dataclasses import dataclass

from .model import ElementType, PlatformConfig


@dataclass(frozen=True, slots=True)
class RowPath:
    """Addresses one innermost 1-D run of an array: len(indices) == ndims-1."""

    array: str
    indices: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Consumer:
    """One row served by a segment.

    offset/size locate the row's bytes inside the segment; reversed means the
    segment stores the row's bytes back to front; elem_bytes is the row's
    element width (reversal and lossy averaging are limited to width 1).
    """

    row: RowPath
    offset: int
    size: int
    reversed: bool = False
    elem_bytes: int = 1


@dataclass(frozen=True, slots=True)
class Segment:
    """A one-dimensional byte string plus the rows it serves.

    drift carries the worst-case per-byte divergence accumulated by lossy
    merges; 0.0 for lossless content.
    """

    data: bytes
    consumers: tuple[Consumer, ...]
    drift: float = 0.0


def encode_scalar(value: int, t: ElementType, p: PlatformConfig) -> bytes:
    """Encode one value as width(t) bytes, two's complement, p.endianness."""
    width = t.width(p)
    lo, hi = t.value_range(p)
    if not lo <= value <= hi:
        raise ValueError(f"internal error: {value} out of range for {t.ctype}")
    return (value & ((1 << (8 * width)) - 1)).to_bytes(width, p.endianness.value)


def decode_scalar(data: bytes, t: ElementType, p: PlatformConfig) -> int:
    """Inverse of encode_scalar."""
    width = t.width(p)
    if len(data) != width:
        raise ValueError(f"wrong byte count: expected {width}, got {len(data)}")
    return int.from_bytes(data, p.endianness.value, signed=t.signed)


def encode_row(values, t: ElementType, p: PlatformConfig) -> bytes:
    return b"".join(encode_scalar(v, t, p) for v in values)


def decode_row(data: bytes, t: ElementType, p: PlatformConfig) -> tuple[int, ...]:
    width = t.width(p)
    if len(data) % width:
        raise ValueError(f"row length {len(data)} is not a multiple of width {width}")
    return tuple(decode_scalar(data[i : i + width], t, p) for i in range(0, len(data), width))


def flatten(arrays, p: PlatformConfig) -> list[Segment]:
    """Decompose every array into per-row byte segments.

    Segments appear in array-declaration order, rows row-major; rows with
    byte-identical content share one segment with merged consumer lists.
    Absent (None) rows produce nothing.
    """
    order: list[tuple[bytes, list[Consumer]]] = []
    index: dict[bytes, int] = {}
    for spec in arrays:
        width = spec.elem_type.width(p)
        for indices, values in spec.rows():
            data = encode_row(values, spec.elem_type, p)
            consumer = Consumer(RowPath(spec.name, indices), 0, len(data), False, width)
            at = index.get(data)
            if at is None:
                index[data] = len(order)
                order.append((data, [consumer]))
            else:
                order[at][1].append(consumer)
    return [Segment(data, tuple(consumers)) for data, consumers in order]


def input_size_bytes(arrays, p: PlatformConfig) -> int:
    """Total encoded size of all present rows (scalars and NULLs excluded)."""
    total = 0
    for spec in arrays:
        width = spec.elem_type.width(p)
        for _, values in spec.rows():
            total += len(values) * width
    return total
