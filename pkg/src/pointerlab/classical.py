"""Classical query algorithms for f and g with query accounting."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from .functions import evaluate, make_grid
from .grid import ONES, Cell, Direction, Entry, build_tree

# smallest alpha (2 decimals) meeting the 1/(nm)^2 miss bound for every
# n = 2m with m a power of two in 8..256, plus n = m = 64, at every k on the halving path of n
DEFAULT_ALPHA = 3.75


@dataclass
class AlgoConfig:
    alpha_sample: float = DEFAULT_ALPHA
    max_reps: int = 1
    seed: Optional[int] = 0

    def __post_init__(self):
        if not self.alpha_sample > 0:
            raise ValueError(f"alpha_sample must be positive, got {self.alpha_sample}")
        if self.max_reps < 1:
            raise ValueError(f"max_reps must be >= 1, got {self.max_reps}")


@dataclass
class RunResult:
    output: int
    queries: int
    transcript: object = None
    aborted: bool = False
    ledger: object = None

    @property
    def cost_units(self) -> float:
        return self.ledger.cost_units if self.ledger is not None else float(self.queries)


class Reader:
    """Memoizing front end: each cell is asked of the oracle at most once."""

    def __init__(self, oracle):
        self.oracle = oracle
        self.n = oracle.n
        self.m = oracle.m
        self.memo: dict[tuple[int, int], Entry] = {}

    def __call__(self, c) -> Entry:
        c = Cell(*c)
        e = self.memo.get(c)
        if e is None:
            e = self.oracle.query(c)
            self.memo[c] = e
        return e

    def column(self, j: int) -> list[Entry]:
        return [self(Cell(i, j)) for i in range(1, self.n + 1)]

    def everything(self, family: str, k: int = 1):
        """Read the whole grid and return it as an input."""
        upd = {Cell(i, j): self(Cell(i, j)) for i in range(1, self.n + 1)
               for j in range(1, self.m + 1)}
        return make_grid(family, self.n, self.m, k, upd)


def _result(read: Reader, output: int, aborted: bool = False) -> RunResult:
    o = read.oracle
    return RunResult(int(output), o.queries, getattr(o, "transcript", None), aborted)


def _walk(read: Reader, a: Cell, skip: Iterable[int]) -> Optional[dict[int, Entry]]:
    """Follow T from ``a``; leaf entry per non-skipped column, or None on any defect."""
    t = build_tree(read.m)
    skip = set(skip)
    out = {}
    for j in range(1, read.m + 1):
        if j in skip:
            continue
        cell = a
        for d in t.paths[j]:
            e = read(cell)
            cell = e.left if d is Direction.LEFT else e.right
            if cell is None:
                return None
        if cell.col != j:
            return None
        leaf = read(cell)
        if leaf.value != 0:
            return None
        out[j] = leaf
    return out


def _special(entries: list[Entry], j: int) -> Optional[Cell]:
    """The unique non-(1,null,null,null) cell of an all-ones column, if any."""
    if any(e.value != 1 for e in entries):
        return None
    odd = [i for i, e in enumerate(entries, 1) if e != ONES]
    return Cell(odd[0], j) if len(odd) == 1 else None


def _verify(read: Reader, j: int) -> tuple[bool, Optional[Cell], dict]:
    a = _special(read.column(j), j)
    if a is None:
        return False, None, {}
    leaves = _walk(read, a, {j})
    if leaves is None:
        return False, a, {}
    return True, a, leaves


def verify_column(o, j: int) -> int:
    """Accept iff column ``j`` is marked and carries a valid f-certificate."""
    read = o if isinstance(o, Reader) else Reader(o)
    ok, _, leaves = _verify(read, j)
    return int(ok and all(e.aux == j for e in leaves.values()))


def sample_count(alpha: float, n: int, m: int, k: int) -> int:
    if k <= 0:
        return n
    return math.ceil(alpha * (n / k) * math.log(n * m))


def test_column(o, c: int, k: int, rng: random.Random, alpha: float = DEFAULT_ALPHA) -> bool:
    """True if no zero shows up among the sampled cells of column ``c``.

    Rows are drawn with replacement; when the sample count reaches ``n`` the
    whole column is read instead.
    """
    read = o if isinstance(o, Reader) else Reader(o)
    n = read.n
    s = sample_count(alpha, n, read.m, k)
    if s >= n:
        return all(e.value != 0 for e in read.column(c))
    for _ in range(s):
        if read(Cell(rng.randrange(1, n + 1), c)).value == 0:
            return False
    return True


def miss_probability(alpha: float, n: int, m: int, k: int) -> float:
    """Chance that test_column says True on a column with floor(k/2)+1 zeroes."""
    z = k // 2 + 1
    s = sample_count(alpha, n, m, k)
    if s >= n or z > n:
        return 0.0
    return (1 - z / n) ** s


def halving_path(n: int) -> list[int]:
    ks = []
    k = n
    while k > 0:
        ks.append(k)
        k //= 2
    return ks


def calibrate_alpha(sizes: Iterable[tuple[int, int]], step: float = 0.01) -> float:
    """Smallest alpha on a ``step`` grid meeting the miss bound 1/(nm)^2 at every size and k."""
    sizes = list(sizes)

    def ok(alpha):
        return all(miss_probability(alpha, n, m, k) <= 1 / (n * m) ** 2
                   for n, m in sizes for k in halving_path(n))

    lo = step
    hi = 1.0
    while not ok(hi):
        hi *= 2
    # ok() is monotone in alpha, so bisect on the grid
    a, b = int(round(lo / step)), int(round(hi / step))
    while a < b:
        mid = (a + b) // 2
        if ok(mid * step):
            b = mid
        else:
            a = mid + 1
    return round(a * step, 10)


def run_R0_f(o, cfg: Optional[AlgoConfig] = None) -> RunResult:
    """Las Vegas evaluation of f; never wrong, only the query count is random."""
    cfg = cfg or AlgoConfig()
    rng = random.Random(cfg.seed)
    read = Reader(o)
    n, m = read.n, read.m
    j = rng.randrange(1, m + 1)
    k = n
    while True:
        col = read.column(j)
        zeros = [e for e in col if e.value == 0]
        if not zeros:
            return _result(read, verify_column(read, j))
        if len(zeros) > k:
            return _result(read, evaluate(read.everything("f")))
        cands = sorted({e.aux for e in zeros if e.aux is not None})
        passed = [c for c in cands if test_column(read, c, k, rng, cfg.alpha_sample)]
        if not passed:
            return _result(read, 0)
        j = passed[0]
        if k == 0:
            return _result(read, 0)
        k //= 2


def _good_column(read: Reader, j: int) -> bool:
    n, m = read.n, read.m
    t = build_tree(m)
    I = list(range(1, n + 1))
    B = list(range(1, m + 1))
    while I and len(B) >= 2:
        i = I[0]
        a = read(Cell(i, j)).aux
        if a is None:
            I.pop(0)
            continue
        jj = next(c for c in B if c != a.col)
        cell = a
        for d in t.paths[jj]:
            e = read(cell)
            cell = e.left if d is Direction.LEFT else e.right
            if cell is None:
                break
        if cell is not None and cell.col == jj and read(cell).value == 0:
            B.remove(jj)
        else:
            I.pop(0)
    if len(B) != 1:
        return False
    b = B[0]
    ok, a, leaves = _verify(read, b)
    if not ok:
        return False
    good = {c for c, e in leaves.items() if e.aux == a}
    return len(good) == m // 2 and j in good


def run_good_column(o, j: int) -> bool:
    """Deterministic test of whether column ``j`` is good."""
    read = o if isinstance(o, Reader) else Reader(o)
    return _good_column(read, j)


def good_column_budget(n: int, m: int) -> int:
    """Upper bound on the queries of run_good_column."""
    depth = max(build_tree(m).depth)
    return (n + m) * (depth + 1) + n + 2 * m


def run_R1_g(o, cfg: Optional[AlgoConfig] = None) -> RunResult:
    """One-sided error for g: pick a random column and test it, ``max_reps`` times."""
    cfg = cfg or AlgoConfig()
    rng = random.Random(cfg.seed)
    read = Reader(o)
    for _ in range(cfg.max_reps):
        if _good_column(read, rng.randrange(1, read.m + 1)):
            return _result(read, 1)
    return _result(read, 0)
