"""Vertex addressing, sparse functions, levels, and inner products on the
rooted tree and on finite patches of the one-ended tree."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Iterator, Optional, Tuple

from .errors import KindMismatch, PatchTooLarge
from .exactnum import as_complex, conj, is_zero

Address = Tuple[int, ...]

ROOT: Address = ()
# The apex of a one-ended patch has a single successor outside the patch;
# index 0 is never a valid child index, so this sentinel is unambiguous.
APEX_SUCCESSOR: Address = (0,)

DEFAULT_ENTRY_BUDGET = 2_000_000


def format_address(x: Address) -> str:
    """Dot-separated decimal form; the empty word prints as "e"."""
    if not x:
        return "e"
    return ".".join(str(i) for i in x)


def parse_address(text: str) -> Address:
    if text == "e":
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError as exc:
        raise ValueError(f"bad vertex address {text!r}: {exc}") from None
    if any(p < 0 for p in parts):
        raise ValueError(f"bad vertex address {text!r}: negative index")
    return parts


def validate_address(x: Address, d: int) -> None:
    for i in x:
        if not 1 <= i <= d:
            raise ValueError(
                f"address {format_address(x)} has index {i} outside 1..{d}")


def children(x: Address, d: int) -> list[Address]:
    return [x + (i,) for i in range(1, d + 1)]


def parent(x: Address) -> Optional[Address]:
    return x[:-1] if x else None


def level(x: Address) -> int:
    return len(x)


def level_vertices(n: int, d: int,
                   budget: int = DEFAULT_ENTRY_BUDGET) -> Iterator[Address]:
    """All d^n level-n vertices in lexicographic order."""
    if d ** n > budget:
        raise PatchTooLarge(
            f"level {n} of the degree-{d} tree has {d ** n} vertices, "
            f"over the budget of {budget}")

    def walk(prefix: Address, remaining: int) -> Iterator[Address]:
        if remaining == 0:
            yield prefix
            return
        for i in range(1, d + 1):
            yield from walk(prefix + (i,), remaining - 1)

    yield from walk((), n)


def subtree_vertices(x: Address, depth: int, d: int,
                     budget: int = DEFAULT_ENTRY_BUDGET) -> Iterator[Address]:
    """Vertices of the subtree below x, down `depth` extra levels."""
    total = (d ** (depth + 1) - 1) // (d - 1)
    if total > budget:
        raise PatchTooLarge(
            f"subtree of depth {depth} has {total} vertices, over the budget of {budget}")

    def walk(prefix: Address, remaining: int) -> Iterator[Address]:
        yield prefix
        if remaining:
            for i in range(1, d + 1):
                yield from walk(prefix + (i,), remaining - 1)

    yield from walk(x, depth)


@dataclass(frozen=True)
class TreeKind:
    """Which tree a function lives on: the rooted tree, or a finite patch of
    the one-ended tree identified by its apex level."""

    shape: str  # "gamma" | "lambda"
    apex_level: Optional[int] = None

    def __post_init__(self):
        if self.shape not in ("gamma", "lambda"):
            raise ValueError(f"unknown tree shape {self.shape!r}")
        if self.shape == "lambda" and (self.apex_level is None or self.apex_level < 0):
            raise ValueError("a lambda patch needs a nonnegative apex level")


GAMMA = TreeKind("gamma")


@dataclass(frozen=True)
class LambdaPatch:
    """Finite window of the one-ended tree: the apex x, everything at most
    `apex_level` levels below it, and one virtual successor above it.

    Patch words are read downward from the apex: the empty word is the apex
    (tree level `apex_level`), a word w of length L sits at tree level
    apex_level - L.  APEX_SUCCESSOR = (0,) is the virtual vertex one level
    above the apex."""

    apex_level: int
    d: int

    def __post_init__(self):
        if self.apex_level < 0:
            raise ValueError("apex level must be nonnegative")
        if self.d < 2:
            raise ValueError("branching degree must be at least 2")
        if self.size() > DEFAULT_ENTRY_BUDGET:
            raise PatchTooLarge(
                f"patch of apex level {self.apex_level} has {self.size()} "
                f"vertices, over the budget of {DEFAULT_ENTRY_BUDGET}")

    def size(self) -> int:
        return (self.d ** (self.apex_level + 1) - 1) // (self.d - 1)

    def vertices(self) -> Iterator[Address]:
        yield from subtree_vertices((), self.apex_level, self.d)

    def level(self, w: Address) -> int:
        if w == APEX_SUCCESSOR:
            return self.apex_level + 1
        return self.apex_level - len(w)

    def contains(self, w: Address) -> bool:
        if w == APEX_SUCCESSOR:
            return False
        return len(w) <= self.apex_level and all(1 <= i <= self.d for i in w)

    def kind(self) -> TreeKind:
        return TreeKind("lambda", self.apex_level)


@dataclass
class SparseFunction:
    """Finitely supported complex-valued function on vertices.

    Entries may be floats/complex or ExactComplex; zero entries are dropped
    so equal functions have equal entry maps."""

    entries: Dict[Address, object] = field(default_factory=dict)
    kind: TreeKind = GAMMA

    def __post_init__(self):
        self.entries = {x: v for x, v in self.entries.items() if not is_zero(v)}

    @staticmethod
    def delta(x: Address, kind: TreeKind = GAMMA, value=1.0) -> "SparseFunction":
        return SparseFunction({x: value}, kind)

    def value(self, x: Address):
        return self.entries.get(x, 0)

    def support(self) -> list[Address]:
        return sorted(self.entries)

    def __add__(self, other: "SparseFunction") -> "SparseFunction":
        _check_kind(self, other)
        out = dict(self.entries)
        for x, v in other.entries.items():
            out[x] = out.get(x, 0) + v
        return SparseFunction(out, self.kind)

    def __sub__(self, other: "SparseFunction") -> "SparseFunction":
        return self + other.scaled(-1)

    def scaled(self, c) -> "SparseFunction":
        return SparseFunction({x: c * v for x, v in self.entries.items()}, self.kind)

    def norm(self) -> float:
        return abs(inner(self, self)) ** 0.5

    def max_abs(self) -> float:
        return max((abs(as_complex(v)) for v in self.entries.values()), default=0.0)

    def to_complex(self) -> "SparseFunction":
        return SparseFunction({x: as_complex(v) for x, v in self.entries.items()},
                              self.kind)

    # -- JSON ----------------------------------------------------------

    def to_json_obj(self) -> list:
        records = []
        for x in self.support():
            v = as_complex(self.entries[x])
            records.append({"address": format_address(x), "re": v.real, "im": v.imag})
        return records

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @staticmethod
    def from_json_obj(records, kind: TreeKind = GAMMA) -> "SparseFunction":
        entries = {}
        for rec in records:
            entries[parse_address(rec["address"])] = complex(rec["re"], rec["im"])
        return SparseFunction(entries, kind)


def _check_kind(f: SparseFunction, g: SparseFunction) -> None:
    if f.kind != g.kind:
        raise KindMismatch(f"functions live on different trees: {f.kind} vs {g.kind}")


def inner(f: SparseFunction, g: SparseFunction):
    """<f, g> = sum f(x) * conj(g(x)); exact when both sides are exact."""
    _check_kind(f, g)
    small, large = (f, g) if len(f.entries) <= len(g.entries) else (g, f)
    total = None
    for x, v in small.entries.items():
        w = large.entries.get(x)
        if w is None:
            continue
        term = f.entries[x] * conj(g.entries[x])
        total = term if total is None else total + term
    return 0.0 if total is None else total


def level_indicator(n: int, d: int, normalized: bool = False,
                    budget: int = DEFAULT_ENTRY_BUDGET) -> SparseFunction:
    """The indicator of level n, or its unit-norm multiple d^(-n/2) * indicator."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    value = d ** (-n / 2) if normalized else 1.0
    return SparseFunction({x: value for x in level_vertices(n, d, budget)}, GAMMA)
