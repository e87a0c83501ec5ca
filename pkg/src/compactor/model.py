"""Input model: typed read-only arrays, target platform description, and the
JSON document that declares them.

All objects are immutable values; validation happens once, at parse time,
so the later pipeline stages can assume well-formed input.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any


class SpecError(ValueError):
    """A specification document is malformed or inconsistent."""


class ElementType(Enum):
    """Supported C element types."""

    UCHAR = "unsigned char"
    SCHAR = "signed char"
    UINT = "unsigned int"
    INT = "int"

    @property
    def ctype(self) -> str:
        return self.value

    @property
    def signed(self) -> bool:
        return self in (ElementType.SCHAR, ElementType.INT)

    @property
    def is_char(self) -> bool:
        return self in (ElementType.UCHAR, ElementType.SCHAR)

    def width(self, platform: PlatformConfig) -> int:
        """Storage width in bytes on the given platform."""
        return 1 if self.is_char else platform.int_bytes

    def value_range(self, platform: PlatformConfig) -> tuple[int, int]:
        bits = 8 * self.width(platform)
        if self.signed:
            return -(1 << (bits - 1)), (1 << (bits - 1)) - 1
        return 0, (1 << bits) - 1


class Endianness(Enum):
    LITTLE = "little"
    BIG = "big"


class NegativeRepr(Enum):
    TWOS_COMPLEMENT = "twos_complement"


class CompactionMethod(Enum):
    REMOVE_SUBARRAYS = "remove_subarrays"
    GREEDY = "greedy"
    REVERSE = "reverse"
    LOSSY = "lossy"
    MAPPING = "mapping"


class TieStrategy(Enum):
    FIRST = "first"
    LAST = "last"
    RANDOM = "random"


_IDENTIFIER = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_C_KEYWORDS = frozenset(
    "auto break case char const continue default do double else enum extern "
    "float for goto if int long register return short signed sizeof static "
    "struct switch typedef union unsigned void volatile while".split()
)


def is_c_identifier(name: str) -> bool:
    return bool(_IDENTIFIER.match(name)) and name not in _C_KEYWORDS


@dataclass(frozen=True)
class PlatformConfig:
    """Target data representation.

    Invariants: int_bytes is 2 or 4; only two's complement is supported for
    negative values; pointer_bytes is used for overhead reporting only.
    """

    int_bytes: int
    endianness: Endianness
    pointer_bytes: int = 4
    negative_repr: NegativeRepr = NegativeRepr.TWOS_COMPLEMENT

    def __post_init__(self) -> None:
        if self.int_bytes not in (2, 4):
            raise SpecError(f"int_bytes must be 2 or 4, got {self.int_bytes}")
        if self.pointer_bytes < 1:
            raise SpecError(f"pointer_bytes must be >= 1, got {self.pointer_bytes}")


@dataclass(frozen=True)
class ArraySpec:
    """One declared read-only array.

    `data` is a nested tuple tree of depth len(dims). Any node above the
    element level may be None, which marks the whole sub-array as absent;
    None never appears at element level.
    """

    name: str
    elem_type: ElementType
    dims: tuple[int, ...]
    data: Any

    @property
    def ndims(self) -> int:
        return len(self.dims)

    def rows(self):
        """Yield (indices, values) for every present row, row-major.

        A row is an innermost one-dimensional run; indices has ndims-1
        entries. Absent (None) sub-trees yield nothing.
        """
        last = self.ndims - 1

        def walk(node, idx, depth):
            if node is None:
                return
            if depth == last:
                yield idx, node
                return
            for i, child in enumerate(node):
                yield from walk(child, idx + (i,), depth + 1)

        yield from walk(self.data, (), 0)

    def null_nodes(self):
        """Yield the index tuple of every None node, at its own level."""
        last = self.ndims - 1

        def walk(node, idx, depth):
            if node is None:
                yield idx
                return
            if depth == last:
                return
            for i, child in enumerate(node):
                yield from walk(child, idx + (i,), depth + 1)

        yield from walk(self.data, (), 0)

    def row_values(self, indices: tuple[int, ...]):
        node = self.data
        for i in indices:
            node = node[i]
        return node


@dataclass(frozen=True)
class ScalarSpec:
    """A named constant passed through to the generated code unchanged."""

    name: str
    elem_type: ElementType
    value: int


def c_div(a: int, b: int) -> int:
    """Integer division truncating toward zero, as C does."""
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


@dataclass(frozen=True)
class MappingDecl:
    """Declared affine map letting `target` be served by `source`'s bytes.

    target[i] == (source[i + w] * num) / den + add for some window offset w,
    with truncating integer division.
    """

    source: str
    target: str
    num: int
    den: int
    add: int

    def apply(self, x: int) -> int:
        return c_div(x * self.num, self.den) + self.add


@dataclass(frozen=True)
class CompactionOptions:
    methods: tuple[CompactionMethod, ...] = (
        CompactionMethod.REMOVE_SUBARRAYS,
        CompactionMethod.GREEDY,
    )
    tie_strategy: TieStrategy = TieStrategy.FIRST
    seed: int | None = 0
    lossy_threshold: float | None = None
    var_name: str = "c"
    emit_static: bool = False
    emit_const: bool = True

    def __post_init__(self) -> None:
        if CompactionMethod.LOSSY in self.methods and self.lossy_threshold is None:
            raise SpecError("lossy method requires lossy_threshold")
        if self.lossy_threshold is not None and self.lossy_threshold < 0:
            raise SpecError("lossy_threshold must be nonnegative")
        if self.tie_strategy is TieStrategy.RANDOM and self.seed is None:
            raise SpecError("random tie strategy requires a seed")
        if not is_c_identifier(self.var_name):
            raise SpecError(f"var_name {self.var_name!r} is not a valid C identifier")


@dataclass(frozen=True)
class ParsedSpec:
    arrays: tuple[ArraySpec, ...]
    scalars: tuple[ScalarSpec, ...]
    platform: PlatformConfig
    mappings: tuple[MappingDecl, ...]
    options: CompactionOptions
    comparisons: Any = None  # user-supplied external numbers, echoed in reports


_CTYPES = {t.value: t for t in ElementType}


def _expect_keys(obj: Any, what: str, required: set[str], optional: set[str]) -> None:
    if not isinstance(obj, dict):
        raise SpecError(f"{what} must be an object")
    missing = required - obj.keys()
    if missing:
        raise SpecError(f"{what}: missing key(s) {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise SpecError(f"{what}: unknown key(s) {sorted(unknown)}")


def _parse_ctype(raw: Any, what: str) -> ElementType:
    if raw not in _CTYPES:
        raise SpecError(f"{what}: unknown type name {raw!r}")
    return _CTYPES[raw]


def _parse_name(raw: Any, what: str) -> str:
    if not isinstance(raw, str) or not is_c_identifier(raw):
        raise SpecError(f"{what}: {raw!r} is not a valid C identifier")
    return raw


def _check_value(v: Any, lo: int, hi: int, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SpecError(f"{where}: element {v!r} is not an integer")
    if not lo <= v <= hi:
        raise SpecError(f"{where}: value {v} out of range [{lo}, {hi}]")
    return v


def _parse_data(node: Any, dims: tuple[int, ...], depth: int, lo: int, hi: int, where: str):
    if depth == len(dims):
        if node is None:
            raise SpecError(f"{where}: NULL at element level")
        return _check_value(node, lo, hi, where)
    if node is None:
        return None
    if not isinstance(node, list) or len(node) != dims[depth]:
        raise SpecError(
            f"{where}: dimension/data mismatch at depth {depth}"
            f" (expected list of {dims[depth]})"
        )
    return tuple(_parse_data(c, dims, depth + 1, lo, hi, where) for c in node)


def _parse_platform(doc: Any) -> PlatformConfig:
    _expect_keys(doc, "platform", {"int_bytes", "endianness"}, {"pointer_bytes", "negative_repr"})
    try:
        endianness = Endianness(doc["endianness"])
    except ValueError:
        raise SpecError(f"platform: unknown endianness {doc['endianness']!r}") from None
    repr_raw = doc.get("negative_repr", "twos_complement")
    try:
        negative_repr = NegativeRepr(repr_raw)
    except ValueError:
        raise SpecError(f"platform: unsupported negative_repr {repr_raw!r}") from None
    int_bytes = doc["int_bytes"]
    if not isinstance(int_bytes, int) or isinstance(int_bytes, bool):
        raise SpecError("platform: int_bytes must be an integer")
    return PlatformConfig(
        int_bytes=int_bytes,
        endianness=endianness,
        pointer_bytes=doc.get("pointer_bytes", 4),
        negative_repr=negative_repr,
    )


def _parse_options(doc: Any) -> CompactionOptions:
    _expect_keys(
        doc,
        "options",
        set(),
        {"methods", "tie_strategy", "seed", "lossy_threshold", "var_name", "static", "const"},
    )
    defaults = CompactionOptions()
    methods = defaults.methods
    if "methods" in doc:
        raw = doc["methods"]
        if not isinstance(raw, list):
            raise SpecError("options: methods must be a list")
        try:
            methods = tuple(CompactionMethod(m) for m in raw)
        except ValueError as e:
            raise SpecError(f"options: unknown method ({e})") from None
    strategy = defaults.tie_strategy
    if "tie_strategy" in doc:
        try:
            strategy = TieStrategy(doc["tie_strategy"])
        except ValueError:
            raise SpecError(f"options: unknown tie_strategy {doc['tie_strategy']!r}") from None
    threshold = doc.get("lossy_threshold")
    if threshold is not None and not isinstance(threshold, (int, float)):
        raise SpecError("options: lossy_threshold must be a number or null")
    return CompactionOptions(
        methods=methods,
        tie_strategy=strategy,
        seed=doc.get("seed", defaults.seed),
        lossy_threshold=threshold,
        var_name=doc.get("var_name", defaults.var_name),
        emit_static=bool(doc.get("static", defaults.emit_static)),
        emit_const=bool(doc.get("const", defaults.emit_const)),
    )


def parse_spec(text: str) -> ParsedSpec:
    """Parse and validate a specification document.

    Raises SpecError with a diagnostic naming the offending array on any
    schema violation; a document that parses is fully usable downstream.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    _expect_keys(doc, "document", {"platform"}, {"options", "scalars", "arrays", "mappings", "comparisons"})

    platform = _parse_platform(doc["platform"])
    options = _parse_options(doc.get("options") or {})

    scalars = []
    for raw in doc.get("scalars") or []:
        _expect_keys(raw, "scalar", {"name", "ctype", "value"}, set())
        name = _parse_name(raw["name"], "scalar")
        t = _parse_ctype(raw["ctype"], f"scalar '{name}'")
        lo, hi = t.value_range(platform)
        scalars.append(ScalarSpec(name, t, _check_value(raw["value"], lo, hi, f"scalar '{name}'")))

    arrays = []
    for raw in doc.get("arrays") or []:
        _expect_keys(raw, "array", {"name", "ctype", "dims", "data"}, set())
        name = _parse_name(raw["name"], "array")
        where = f"array '{name}'"
        t = _parse_ctype(raw["ctype"], where)
        dims_raw = raw["dims"]
        if (
            not isinstance(dims_raw, list)
            or not 1 <= len(dims_raw) <= 3
            or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 1 for d in dims_raw)
        ):
            raise SpecError(f"{where}: dims must be a list of 1-3 positive integers")
        dims = tuple(dims_raw)
        lo, hi = t.value_range(platform)
        data = _parse_data(raw["data"], dims, 0, lo, hi, where)
        arrays.append(ArraySpec(name, t, dims, data))

    seen: set[str] = set()
    for name in [a.name for a in arrays] + [s.name for s in scalars]:
        if name in seen:
            raise SpecError(f"duplicate array name '{name}'")
        seen.add(name)

    mappings = []
    for raw in doc.get("mappings") or []:
        _expect_keys(raw, "mapping", {"source", "target", "num", "den", "add"}, set())
        for k in ("num", "den", "add"):
            if not isinstance(raw[k], int) or isinstance(raw[k], bool):
                raise SpecError(f"mapping: {k} must be an integer")
        if raw["den"] == 0:
            raise SpecError("mapping: den must be nonzero")
        mappings.append(
            MappingDecl(raw["source"], raw["target"], raw["num"], raw["den"], raw["add"])
        )
    validate_mapping_decls(arrays, mappings)

    return ParsedSpec(
        arrays=tuple(arrays),
        scalars=tuple(scalars),
        platform=platform,
        mappings=tuple(mappings),
        options=options,
        comparisons=doc.get("comparisons"),
    )


def validate_mapping_decls(arrays: list[ArraySpec] | tuple[ArraySpec, ...], mappings) -> None:
    """Check that every mapping joins two existing, 1-D, same-type arrays."""
    by_name = {a.name: a for a in arrays}
    targets: set[str] = set()
    edges: dict[str, str] = {}
    for m in mappings:
        for role, name in (("source", m.source), ("target", m.target)):
            if name not in by_name:
                raise SpecError(f"mapping: dangling name '{name}' ({role})")
        if m.source == m.target:
            raise SpecError(f"mapping: source and target are both '{m.source}'")
        src, tgt = by_name[m.source], by_name[m.target]
        if src.ndims != 1 or tgt.ndims != 1:
            raise SpecError(f"mapping '{m.source}'->'{m.target}': dimension mismatch (both must be 1-D)")
        if src.elem_type is not tgt.elem_type:
            raise SpecError(f"mapping '{m.source}'->'{m.target}': type mismatch")
        if src.data is None or tgt.data is None:
            raise SpecError(f"mapping '{m.source}'->'{m.target}': NULL array cannot be mapped")
        if m.target in targets:
            raise SpecError(f"mapping: '{m.target}' is the target of more than one mapping")
        targets.add(m.target)
        edges[m.target] = m.source
    for start in edges:
        node, hops = start, 0
        while node in edges:
            node = edges[node]
            hops += 1
            if hops > len(edges):
                raise SpecError(f"mapping: cycle involving '{start}'")


def _data_to_jsonable(node):
    if node is None or isinstance(node, int):
        return node
    return [_data_to_jsonable(c) for c in node]


def serialize_spec(spec: ParsedSpec) -> str:
    """Render a parsed model back to its document form (stable round trip)."""
    doc: dict[str, Any] = {
        "platform": {
            "int_bytes": spec.platform.int_bytes,
            "endianness": spec.platform.endianness.value,
            "pointer_bytes": spec.platform.pointer_bytes,
            "negative_repr": spec.platform.negative_repr.value,
        },
        "options": {
            "methods": [m.value for m in spec.options.methods],
            "tie_strategy": spec.options.tie_strategy.value,
            "seed": spec.options.seed,
            "lossy_threshold": spec.options.lossy_threshold,
            "var_name": spec.options.var_name,
            "static": spec.options.emit_static,
            "const": spec.options.emit_const,
        },
        "scalars": [
            {"name": s.name, "ctype": s.elem_type.ctype, "value": s.value} for s in spec.scalars
        ],
        "arrays": [
            {
                "name": a.name,
                "ctype": a.elem_type.ctype,
                "dims": list(a.dims),
                "data": _data_to_jsonable(a.data),
            }
            for a in spec.arrays
        ],
        "mappings": [
            {"source": m.source, "target": m.target, "num": m.num, "den": m.den, "add": m.add}
            for m in spec.mappings
        ],
    }
    if spec.comparisons is not None:
        doc["comparisons"] = spec.comparisons
    return json.dumps(doc, indent=2)
