"""Grid cells, the cell alphabet, the canonical balanced tree, and bit encoding."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, NamedTuple, Optional, Union

FAMILIES = ("gpw", "f", "g", "h")


class Cell(NamedTuple):
    """1-based grid coordinate."""

    row: int
    col: int


Pointer = Optional[Cell]
Aux = Union[Cell, int, None]


class Entry(NamedTuple):
    """Contents of one cell: value bit, left/right cell pointers, auxiliary slot.

    Family ``gpw`` has a single pointer, kept in ``left``.  The auxiliary slot
    holds a column index for family ``f`` (back pointer to a column) and a
    :class:`Cell` for ``g`` (back pointer to a cell) and ``h`` (internal
    pointer).  ``None`` is the null pointer everywhere.
    """

    value: int
    left: Pointer = None
    right: Pointer = None
    aux: Aux = None


ONES = Entry(1)
ZERO = Entry(0)


class SchemaError(ValueError):
    pass


def check_entry(e: Entry, n: int, m: int, family: str) -> None:
    """Raise :class:`SchemaError` unless ``e`` is a valid letter of the family's alphabet."""
    if family not in FAMILIES:
        raise SchemaError(f"unknown family {family!r}")
    if e.value not in (0, 1) or isinstance(e.value, bool):
        raise SchemaError(f"value must be 0 or 1, got {e.value!r}")

    def cell_ok(p) -> bool:
        return p is None or (
            isinstance(p, tuple) and len(p) == 2
            and 1 <= p[0] <= n and 1 <= p[1] <= m
        )

    if family == "gpw":
        if e.right is not None or e.aux is not None:
            raise SchemaError("gpw cells carry a single pointer in the left slot")
        if not cell_ok(e.left):
            raise SchemaError(f"pointer outside the {n}x{m} grid: {e}")
        return
    if not (cell_ok(e.left) and cell_ok(e.right)):
        raise SchemaError(f"left/right pointer outside the {n}x{m} grid: {e}")
    if family == "f":
        if e.aux is not None and not (
            isinstance(e.aux, int) and not isinstance(e.aux, tuple) and 1 <= e.aux <= m
        ):
            raise SchemaError(f"back pointer must be a column in 1..{m}: {e.aux!r}")
    elif not cell_ok(e.aux):
        raise SchemaError(f"aux pointer outside the grid: {e.aux!r}")


# --------------------------------------------------------------------------
# booleanization


def _field_widths(n: int, m: int, family: str) -> list[tuple[str, int]]:
    wc = (n * m).bit_length()  # ceil(log2(nm + 1))
    if family == "gpw":
        return [("value", 1), ("left", wc)]
    aux_w = m.bit_length() if family == "f" else wc
    return [("value", 1), ("left", wc), ("right", wc), ("aux", aux_w)]


def entry_width(n: int, m: int, family: str) -> int:
    return sum(w for _, w in _field_widths(n, m, family))


def encode_entry(e: Entry, n: int, m: int, family: str) -> str:
    """Fixed-width bit string for ``e``; pointers are 0 for null, else 1 + row-major index."""
    check_entry(e, n, m, family)
    out = []
    for name, width in _field_widths(n, m, family):
        v = getattr(e, name)
        if name == "value":
            code = v
        elif v is None:
            code = 0
        elif isinstance(v, tuple):
            code = 1 + (v[0] - 1) * m + (v[1] - 1)
        else:
            code = v
        out.append(format(code, f"0{width}b"))
    return "".join(out)


def decode_entry(bits: str, n: int, m: int, family: str) -> Entry:
    if len(bits) != entry_width(n, m, family) or set(bits) - {"0", "1"}:
        raise SchemaError(f"bad bit string of length {len(bits)}")
    fields = {}
    pos = 0
    for name, width in _field_widths(n, m, family):
        code = int(bits[pos:pos + width], 2)
        pos += width
        if name == "value":
            fields[name] = code
        elif code == 0:
            fields[name] = None
        elif name == "aux" and family == "f":
            fields[name] = code
        else:
            if code > n * m:
                raise SchemaError(f"pointer code {code} out of range")
            fields[name] = Cell((code - 1) // m + 1, (code - 1) % m + 1)
    e = Entry(**fields)
    check_entry(e, n, m, family)
    return e


# --------------------------------------------------------------------------
# canonical balanced tree


class Direction(str, Enum):
    LEFT = "L"
    RIGHT = "R"


@dataclass(frozen=True)
class BalancedTree:
    """Canonical oriented binary tree with ``m`` leaves.

    The canonical construction (complete tree on ``2**k`` leaves, then a pair of
    children under each of the ``m - 2**k`` leftmost leaves) is exactly the
    heap-ordered binary tree on ``2m - 1`` nodes, so node ``v`` has children
    ``2v + 1`` and ``2v + 2``.  Node 0 is the root; nodes ``0..m-2`` are internal.
    """

    m: int
    parent: tuple[int, ...]
    left: tuple[int, ...]
    right: tuple[int, ...]
    depth: tuple[int, ...]
    size: tuple[int, ...]
    label: tuple[int, ...]      # leaf label per node, 0 for internal nodes
    leaf_node: tuple[int, ...]  # leaf_node[j] = node id of leaf j (index 0 unused)
    paths: tuple[tuple[Direction, ...], ...]  # paths[j] = T(j), index 0 unused

    @property
    def root(self) -> int:
        return 0

    @property
    def num_nodes(self) -> int:
        return len(self.parent)

    @property
    def internal_nodes(self) -> range:
        return range(self.m - 1)

    def is_leaf(self, v: int) -> bool:
        return self.label[v] != 0

    def children(self, v: int) -> tuple[int, int]:
        return self.left[v], self.right[v]

    def leaves_under(self, v: int) -> list[int]:
        """Leaf labels in the subtree of ``v``, left to right."""
        out = []
        stack = [v]
        while stack:
            u = stack.pop()
            if self.label[u]:
                out.append(self.label[u])
            else:
                stack.append(self.right[u])
                stack.append(self.left[u])
        return out

    def is_ancestor(self, u: int, v: int) -> bool:
        """True when ``u`` lies on the root path of ``v`` (inclusive)."""
        while v > u:
            v = self.parent[v]
        return v == u


@lru_cache(maxsize=None)
def build_tree(m: int) -> BalancedTree:
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"tree needs m >= 1 leaves, got {m!r}")
    total = 2 * m - 1
    parent = [-1] + [(v - 1) // 2 for v in range(1, total)]
    left = [2 * v + 1 if 2 * v + 1 < total else -1 for v in range(total)]
    right = [2 * v + 2 if 2 * v + 2 < total else -1 for v in range(total)]
    depth = [0] * total
    for v in range(1, total):
        depth[v] = depth[parent[v]] + 1
    size = [1] * total
    for v in range(total - 1, 0, -1):
        size[parent[v]] += size[v]

    label = [0] * total
    leaf_node = [0] * (m + 1)
    paths: list[tuple[Direction, ...]] = [()] * (m + 1)
    # in-order walk assigns leaf labels left to right
    counter = 0
    stack: list[tuple[int, tuple[Direction, ...]]] = [(0, ())]
    while stack:
        v, path = stack.pop()
        if left[v] == -1:
            counter += 1
            label[v] = counter
            leaf_node[counter] = v
            paths[counter] = path
        else:
            stack.append((right[v], path + (Direction.RIGHT,)))
            stack.append((left[v], path + (Direction.LEFT,)))
    return BalancedTree(
        m, tuple(parent), tuple(left), tuple(right), tuple(depth), tuple(size),
        tuple(label), tuple(leaf_node), tuple(paths),
    )


def tree_path(t: BalancedTree, j: int) -> tuple[Direction, ...]:
    if not 1 <= j <= t.m:
        raise ValueError(f"leaf label {j} outside 1..{t.m}")
    return t.paths[j]


def expected_subtree_size(t: BalancedTree, marked: Iterable[int]) -> Fraction:
    """Mean subtree size over the marked nodes, as an exact fraction."""
    nodes = set(marked)
    if not nodes:
        raise ValueError("marked set is empty")
    if min(nodes) < 0 or max(nodes) >= t.num_nodes:
        raise ValueError("marked node outside the tree")
    return Fraction(sum(t.size[v] for v in nodes), len(nodes))


def worst_case_subtree_ratio(m: int) -> Fraction:
    """Largest possible mean subtree size over marked sets covering >= 1/4 of the nodes.

    The average of a set is maximised by taking the largest subtrees, and the
    average of the top-s sizes only drops as s grows, so the worst case is the
    top quarter.
    """
    t = build_tree(m)
    need = math.ceil(t.num_nodes / 4)
    top = sorted(t.size, reverse=True)[:need]
    return Fraction(sum(top), need)


def fit_c0(m_values: Iterable[int]) -> float:
    """Smallest C0 (to 3 decimals, rounded up) with worst-case mean <= C0*log2(m)."""
    best = 0.0
    for m in m_values:
        if m < 2:
            continue
        best = max(best, float(worst_case_subtree_ratio(m)) / math.log2(m))
    return math.ceil(best * 1000) / 1000
