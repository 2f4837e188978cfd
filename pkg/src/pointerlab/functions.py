"""The four pointer-function families: evaluation, instance generation, certificates."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .grid import (
    FAMILIES, ONES, ZERO, BalancedTree, Cell, Direction, Entry, SchemaError,
    build_tree, check_entry,
)


class NotPositive(ValueError):
    """Raised when a 1-certificate is requested for a negative input."""


class InfeasibleSize(ValueError):
    """Raised when the grid is too small to host the requested construction."""


@dataclass(frozen=True, eq=False)
class GridInput:
    family: str
    n: int
    m: int
    k: int
    rows: tuple[tuple[Entry, ...], ...]

    def __getitem__(self, cell: tuple[int, int]) -> Entry:
        return self.rows[cell[0] - 1][cell[1] - 1]

    def column(self, j: int) -> list[Entry]:
        return [row[j - 1] for row in self.rows]

    def cells(self) -> Iterator[tuple[Cell, Entry]]:
        for i, row in enumerate(self.rows, 1):
            for j, e in enumerate(row, 1):
                yield Cell(i, j), e

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridInput):
            return NotImplemented
        return (self.family, self.n, self.m, self.k, self.rows) == (
            other.family, other.n, other.m, other.k, other.rows)

    def __hash__(self) -> int:
        return hash((self.family, self.n, self.m, self.k, self.rows))

    def replace(self, updates: Mapping[tuple[int, int], Entry]) -> "GridInput":
        return make_grid(self.family, self.n, self.m, self.k, updates, base=self)

    def validate(self) -> None:
        _check_params(self.family, self.n, self.m, self.k)
        if len(self.rows) != self.n or any(len(r) != self.m for r in self.rows):
            raise SchemaError("grid shape does not match n x m")
        seen = set()
        for row in self.rows:
            for e in row:
                if id(e) not in seen:
                    check_entry(e, self.n, self.m, self.family)
                    seen.add(id(e))


def _check_params(family: str, n: int, m: int, k: int) -> None:
    if family not in FAMILIES:
        raise SchemaError(f"unknown family {family!r}")
    if n < 1 or m < 1:
        raise SchemaError(f"grid dimensions must be positive, got {n}x{m}")
    if family == "g" and m % 2:
        raise SchemaError(f"family g needs an even number of columns, got m={m}")
    if family == "h":
        if not 1 <= k < m:
            raise SchemaError(f"family h needs 1 <= k < m, got k={k}, m={m}")
    elif k != 1:
        raise SchemaError(f"k is only meaningful for family h (got k={k})")


def make_grid(
    family: str,
    n: int,
    m: int,
    k: int = 1,
    updates: Optional[Mapping[tuple[int, int], Entry]] = None,
    fill: Entry = ONES,
    base: Optional[GridInput] = None,
    check: bool = True,
) -> GridInput:
    """Grid filled with ``fill`` (or copied from ``base``), then patched with ``updates``.

    Only the fill entry and the patched entries are schema-checked; ``base`` is
    trusted to be valid already.  ``check=False`` skips the entry checks for
    callers that build letters of the alphabet by construction.
    """
    _check_params(family, n, m, k)
    if base is not None:
        rows = [list(r) for r in base.rows]
    else:
        check_entry(fill, n, m, family)
        rows = [[fill] * m for _ in range(n)]
    for (i, j), e in (updates or {}).items():
        if not (1 <= i <= n and 1 <= j <= m):
            raise SchemaError(f"cell ({i},{j}) outside the {n}x{m} grid")
        if check:
            check_entry(e, n, m, family)
        rows[i - 1][j - 1] = e
    return GridInput(family, n, m, k, tuple(tuple(r) for r in rows))


# --------------------------------------------------------------------------
# evaluation


def all_one_columns(x: GridInput) -> list[int]:
    return [j for j, col in enumerate(zip(*x.rows), 1) if all(e.value == 1 for e in col)]


def special_cells(x: GridInput, j: int) -> list[Cell]:
    """Cells of column ``j`` that differ from (1, null, null, null)."""
    return [Cell(i, j) for i, row in enumerate(x.rows, 1) if row[j - 1] != ONES]


def follow(x: GridInput, start: Cell, path: Sequence[Direction]) -> Optional[Cell]:
    cell = start
    for d in path:
        e = x[cell]
        cell = e.left if d is Direction.LEFT else e.right
        if cell is None:
            return None
    return cell


def _leaves(x: GridInput, root: Cell, skip: set[int]) -> Optional[dict[int, Cell]]:
    """Leaf cell per non-skipped column, or None if some leaf is missing or wrong."""
    t = build_tree(x.m)
    out = {}
    for j in range(1, x.m + 1):
        if j in skip:
            continue
        leaf = follow(x, root, t.paths[j])
        if leaf is None or leaf[1] != j or x[leaf].value != 0:
            return None
        out[j] = leaf
    return out


def _unique_special(x: GridInput, b: int) -> Optional[Cell]:
    cand = special_cells(x, b)
    return cand[0] if len(cand) == 1 else None


def _eval_gpw(x: GridInput) -> int:
    marked = all_one_columns(x)
    if len(marked) != 1:
        return 0
    b = marked[0]
    a = _unique_special(x, b)
    if a is None:
        return 0
    visited = set()
    p = x[a].left
    for _ in range(x.m - 1):
        if p is None or x[p].value != 0:
            return 0
        visited.add(p[1])
        p = x[p].left
    return int(visited == set(range(1, x.m + 1)) - {b})


def _eval_f_or_g(x: GridInput) -> int:
    marked = all_one_columns(x)
    if len(marked) != 1:
        return 0
    b = marked[0]
    a = _unique_special(x, b)
    if a is None:
        return 0
    leaves = _leaves(x, a, {b})
    if leaves is None:
        return 0
    if x.family == "f":
        return int(all(x[c].aux == b for c in leaves.values()))
    good = sum(1 for c in leaves.values() if x[c].aux == a)
    return int(good == x.m // 2)


def _eval_h(x: GridInput) -> int:
    marked = all_one_columns(x)
    if len(marked) != x.k:
        return 0
    specials = []
    for b in marked:
        a = _unique_special(x, b)
        if a is None:
            return 0
        specials.append(a)
    start = specials[0]
    pointers = (x[start].left, x[start].right)
    if any((x[a].left, x[a].right) != pointers for a in specials):
        return 0
    seen = []
    cur = start
    for _ in range(x.k):
        seen.append(cur)
        cur = x[cur].aux
        if cur is None:
            return 0
    if cur != start or set(seen) != set(specials) or len(set(seen)) != x.k:
        return 0
    return int(_leaves(x, start, set(marked)) is not None)


def evaluate(x: GridInput) -> int:
    if x.family == "gpw":
        return _eval_gpw(x)
    if x.family in ("f", "g"):
        return _eval_f_or_g(x)
    if x.family == "h":
        return _eval_h(x)
    raise SchemaError(f"unknown family {x.family!r}")


def good_columns(x: GridInput) -> set[int]:
    """Columns whose leaf back-points to the special element (empty for negatives)."""
    if x.family != "g":
        raise SchemaError("good columns are defined for family g only")
    if not evaluate(x):
        return set()
    b = all_one_columns(x)[0]
    a = _unique_special(x, b)
    leaves = _leaves(x, a, {b})
    return {j for j, c in leaves.items() if x[c].aux == a}


# --------------------------------------------------------------------------
# positive instances


@dataclass
class Placement:
    """Where each part of a positive instance goes.

    ``marked`` lists the marked columns (for ``h`` in internal-pointer cycle
    order) and ``special_rows`` the matching special-element rows.  For the tree
    families ``node_cells`` maps non-root internal tree nodes to cells; for
    ``gpw`` ``path_order`` lists the non-marked columns in path order.
    """

    marked: tuple[int, ...]
    special_rows: tuple[int, ...]
    leaf_rows: dict[int, int]
    node_cells: dict[int, Cell] = field(default_factory=dict)
    path_order: tuple[int, ...] = ()
    good: frozenset[int] = frozenset()
    decoys: dict[int, Optional[Cell]] = field(default_factory=dict)


def needed_nodes(t: BalancedTree, skip: set[int]) -> list[int]:
    """Non-root internal nodes lying on the path to some leaf outside ``skip``."""
    need = set()
    for j in range(1, t.m + 1):
        if j in skip:
            continue
        v = t.parent[t.leaf_node[j]]
        while v > 0:
            need.add(v)
            v = t.parent[v]
    return sorted(need)


def random_placement(family: str, n: int, m: int, k: int, rng: random.Random) -> Placement:
    _check_params(family, n, m, k)
    if m < 2:
        raise InfeasibleSize("positive instances need m >= 2")
    if n < 2 and family != "gpw":
        raise InfeasibleSize("tree families need n >= 2")
    nmarked = k if family == "h" else 1
    marked = tuple(rng.sample(range(1, m + 1), nmarked))
    special_rows = tuple(rng.randrange(1, n + 1) for _ in marked)
    others = [j for j in range(1, m + 1) if j not in marked]
    leaf_rows = {j: rng.randrange(1, n + 1) for j in others}
    if family == "gpw":
        order = others[:]
        rng.shuffle(order)
        return Placement(marked, special_rows, leaf_rows, path_order=tuple(order))

    t = build_tree(m)
    nodes = needed_nodes(t, set(marked))
    used = {Cell(i, j) for j, i in leaf_rows.items()}
    free = [Cell(i, j) for j in others for i in range(1, n + 1) if Cell(i, j) not in used]
    if len(free) < len(nodes):
        raise InfeasibleSize(
            f"{n}x{m} grid has {len(free)} free cells for {len(nodes)} tree nodes")
    node_cells = dict(zip(nodes, rng.sample(free, len(nodes))))
    pl = Placement(marked, special_rows, leaf_rows, node_cells)
    if family == "g":
        good = frozenset(rng.sample(others, m // 2))
        taken = used | set(node_cells.values())
        spare = [Cell(i, j) for j in others for i in range(1, n + 1) if Cell(i, j) not in taken]
        pl.good = good
        for j in others:
            if j not in good:
                pl.decoys[j] = rng.choice(spare) if spare and rng.random() < 0.5 else None
    return pl


def _random_entry(family: str, n: int, m: int, rng: random.Random) -> Entry:
    # rng.random() scaling instead of randrange: this runs once per garbage cell
    r = rng.random

    def ptr():
        if r() < 0.5:
            return None
        return Cell(int(r() * n) + 1, int(r() * m) + 1)

    value = 1 if r() < 0.5 else 0
    if family == "gpw":
        return Entry(value, ptr())
    if family == "f":
        aux = None if r() < 0.5 else int(r() * m) + 1
        return Entry(value, ptr(), ptr(), aux)
    return Entry(value, ptr(), ptr(), ptr())


def build_positive(
    family: str,
    n: int,
    m: int,
    k: int,
    pl: Placement,
    garbage: str = "ones",
    rng: Optional[random.Random] = None,
) -> GridInput:
    """Assemble a positive input from an explicit placement."""
    updates: dict[Cell, Entry] = {}
    specials = [Cell(r, b) for r, b in zip(pl.special_rows, pl.marked)]
    a = specials[0]

    if family == "gpw":
        chain = [Cell(pl.leaf_rows[j], j) for j in pl.path_order]
        targets = chain + [None]
        updates[a] = Entry(1, targets[0])
        for c, nxt in zip(chain, targets[1:]):
            updates[c] = Entry(0, nxt)
    else:
        t = build_tree(m)
        skip = set(pl.marked)
        where: dict[int, Optional[Cell]] = {0: a}
        where.update(pl.node_cells)
        for j, i in pl.leaf_rows.items():
            where[t.leaf_node[j]] = Cell(i, j)

        def child_cells(v):
            return tuple(where.get(c) for c in t.children(v))

        lft, rgt = child_cells(0)
        for s, sp in enumerate(specials):
            aux = specials[(s + 1) % len(specials)] if family == "h" else None
            updates[sp] = Entry(1, lft, rgt, aux)
        for v, c in pl.node_cells.items():
            lft, rgt = child_cells(v)
            updates[c] = Entry(0, lft, rgt, None)
        for j, i in pl.leaf_rows.items():
            if j in skip:
                continue
            if family == "f":
                aux = pl.marked[0]
            elif family == "g":
                aux = a if j in pl.good else pl.decoys.get(j)
            else:
                aux = None
            updates[Cell(i, j)] = Entry(0, None, None, aux)

    x = make_grid(family, n, m, k, updates)
    if garbage == "random":
        rng = rng or random.Random(0)
        marked = set(pl.marked)
        junk = {}
        for i in range(1, n + 1):
            for j in range(1, m + 1):
                c = Cell(i, j)
                if j not in marked and c not in updates:
                    junk[c] = _random_entry(family, n, m, rng)
        x = make_grid(family, n, m, k, junk, base=x, check=False)
    elif garbage != "ones":
        raise ValueError(f"garbage mode must be 'ones' or 'random', got {garbage!r}")
    return x


def generate_positive(
    family: str,
    n: int,
    m: int,
    k: int = 1,
    seed: Optional[int] = None,
    *,
    rng: Optional[random.Random] = None,
    placement: Optional[Placement] = None,
    garbage: str = "ones",
) -> GridInput:
    rng = rng or random.Random(seed)
    pl = placement or random_placement(family, n, m, k, rng)
    return build_positive(family, n, m, k, pl, garbage, rng)


# --------------------------------------------------------------------------
# hard distributions


@dataclass(frozen=True)
class HardSampleG:
    zero_rows: tuple[int, ...]  # zero_rows[j-1] = row of the zero in column j

    @classmethod
    def draw(cls, n: int, m: int, rng: random.Random) -> "HardSampleG":
        return cls(tuple(rng.randrange(1, n + 1) for _ in range(m)))

    def to_grid(self, family: str, n: int, k: int = 1) -> GridInput:
        m = len(self.zero_rows)
        return make_grid(family, n, m, k, {(i, j): ZERO for j, i in enumerate(self.zero_rows, 1)})


def sample_hard_negative(
    family: str, n: int, m: int, seed: Optional[int] = None, *,
    k: int = 1, rng: Optional[random.Random] = None,
) -> GridInput:
    """One zero per column in a uniformly random row, everything else (1, null, null, null)."""
    rng = rng or random.Random(seed)
    return HardSampleG.draw(n, m, rng).to_grid(family, n, k)


@dataclass(frozen=True)
class HardSampleH1:
    v: int
    pi: tuple[int, ...]         # pi[u] = column of internal node u
    leaf_rows: tuple[int, ...]  # indexed by column - 1
    node_rows: tuple[int, ...]  # indexed by column - 1

    @property
    def root_cell(self) -> Cell:
        c = self.pi[0]
        return Cell(self.node_rows[c - 1], c)

    @classmethod
    def draw(cls, n: int, m: int, rng: random.Random) -> "HardSampleH1":
        if n < 2 or m < 2:
            raise InfeasibleSize("the h1 hard distribution needs n >= 2 and m >= 2")
        v = rng.randrange(2)
        pi = tuple(rng.sample(range(1, m + 1), m - 1))
        leaf_rows, node_rows = [], []
        for _ in range(m):
            r1, r2 = rng.sample(range(1, n + 1), 2)
            leaf_rows.append(r1)
            node_rows.append(r2)
        return cls(v, pi, tuple(leaf_rows), tuple(node_rows))

    def to_grid(self, n: int) -> GridInput:
        m = len(self.leaf_rows)
        t = build_tree(m)
        removed = self.pi[0]
        where: dict[int, Cell] = {}
        for u in t.internal_nodes:
            c = self.pi[u]
            where[u] = Cell(self.node_rows[c - 1], c)
        for j in range(1, m + 1):
            if j != removed:
                where[t.leaf_node[j]] = Cell(self.leaf_rows[j - 1], j)
        updates = {}
        for j in range(1, m + 1):
            if j != removed:
                updates[where[t.leaf_node[j]]] = ZERO
        for u in t.internal_nodes:
            lft, rgt = (where.get(c) for c in t.children(u))
            if u == 0:
                updates[where[u]] = Entry(self.v, lft, rgt, where[u])
            else:
                updates[where[u]] = Entry(0, lft, rgt, None)
        return make_grid("h", n, m, 1, updates)


def sample_hard_h1(n: int, m: int, seed: Optional[int] = None, *,
                   rng: Optional[random.Random] = None) -> tuple[GridInput, HardSampleH1]:
    rng = rng or random.Random(seed)
    s = HardSampleH1.draw(n, m, rng)
    return s.to_grid(n), s


# --------------------------------------------------------------------------
# certificates


Certificate = dict  # Cell -> Entry, the fixed positions of a 1-certificate


def _tree_cells(x: GridInput, root: Cell, skip: set[int]) -> set[Cell]:
    t = build_tree(x.m)
    out = set()
    for j in range(1, x.m + 1):
        if j in skip:
            continue
        cell = root
        for d in t.paths[j]:
            e = x[cell]
            cell = e.left if d is Direction.LEFT else e.right
            out.add(cell)
    return out


def extract_certificate(x: GridInput) -> Certificate:
    """Forced 1-certificate: marked column(s) in full plus every cell on the pointer structure."""
    if not evaluate(x):
        raise NotPositive("input evaluates to 0")
    marked = all_one_columns(x)
    cells = {Cell(i, b) for b in marked for i in range(1, x.n + 1)}
    a = _unique_special(x, marked[0])
    if x.family == "gpw":
        p = x[a].left
        for _ in range(x.m - 1):
            cells.add(p)
            p = x[p].left
    else:
        cells |= _tree_cells(x, a, set(marked))
    return {c: x[c] for c in sorted(cells)}


def random_completion(cert: Certificate, family: str, n: int, m: int, k: int,
                      rng: random.Random) -> GridInput:
    """Fill every cell outside the certificate with a random letter of the alphabet."""
    updates = dict(cert)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if (i, j) not in updates:
                updates[Cell(i, j)] = _random_entry(family, n, m, rng)
    return make_grid(family, n, m, k, updates, check=False)


def random_entry(family: str, n: int, m: int, rng: random.Random) -> Entry:
    return _random_entry(family, n, m, rng)


def mutate_one(x: GridInput, rng: random.Random) -> GridInput:
    """Copy of ``x`` with a single random cell replaced by a random letter."""
    c = Cell(rng.randrange(1, x.n + 1), rng.randrange(1, x.m + 1))
    e = ONES if rng.random() < 0.25 else _random_entry(x.family, x.n, x.m, rng)
    return x.replace({c: e})
