"""Shared fixtures-as-code for the test suite."""

from compactor import Consumer, RowPath, Segment


def seg(*values: int, name: str = "s", indices: tuple = (), elem_bytes: int = 1) -> Segment:
    """A segment with one synthetic single-row consumer."""
    data = bytes(values)
    return Segment(data, (Consumer(RowPath(name, indices), 0, len(data), False, elem_bytes),))


def seg_bytes(data: bytes, name: str = "s", elem_bytes: int = 1) -> Segment:
    return Segment(data, (Consumer(RowPath(name, ()), 0, len(data), False, elem_bytes),))
