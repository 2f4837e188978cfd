"""Cost-model emulation of the quantum subroutines and the quantum drivers.

Nothing here touches amplitudes.  Each primitive looks at the ground truth,
returns an answer with the input/output behaviour of the real subroutine and
charges its cost formula to a :class:`CostLedger`.
"""
from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

from .adversary import CountingOracle
from .classical import Reader, RunResult, _good_column
from .config import LabConfig
from .functions import GridInput, evaluate
from .grid import ONES, Cell, Direction, build_tree


class PromiseViolation(Exception):
    """An exact primitive was called with a wrong count of marked items."""


class CostLedger:
    def __init__(self, cfg: Optional[LabConfig] = None, rng: Optional[random.Random] = None):
        self.cfg = cfg or LabConfig()
        self.rng = rng or random.Random(0)
        self.classical_queries = 0
        self.cost_units = 0.0
        self.breakdown: dict[str, float] = defaultdict(float)
        self.calls: dict[str, int] = defaultdict(int)

    @property
    def reps(self) -> int:
        return max(1, math.ceil(math.log2(1 / self.cfg.eps)))

    def charge(self, name: str, units: float) -> float:
        if units < 0:
            raise ValueError("charges must be nonnegative")
        self.cost_units += units
        self.breakdown[name] += units
        self.calls[name] += 1
        return units

    def classical(self, n: int = 1) -> None:
        self.classical_queries += n
        self.charge("classical", n)

    def injected_failure(self) -> bool:
        return self.cfg.inject_errors and self.rng.random() < self.cfg.eps


@dataclass
class EmulatedOutcome:
    value: Any
    failed: bool
    cost: float


def _theta(count: int, N: int) -> float:
    return math.asin(math.sqrt(min(count, N) / N))


def grover_hit_probability(actual: int, promise: int, N: int, reps: int) -> float:
    """Success chance of ``reps`` Grover runs tuned for ``promise`` marked items out of ``N``."""
    if actual <= 0:
        return 0.0
    if actual >= promise:
        return 1.0
    r = math.floor(math.pi / (4 * _theta(promise, N)))
    p = math.sin((2 * r + 1) * _theta(actual, N)) ** 2
    return 1 - (1 - p) ** reps


def grover_find(ledger: CostLedger, items: Sequence, pred: Callable, t: int = 1,
                item_cost: float = 1.0, name: str = "grover") -> EmulatedOutcome:
    """Search ``items`` for one satisfying ``pred``, assuming at least ``t`` of them do."""
    if t < 1:
        raise ValueError("grover_find needs a promise t >= 1")
    N = len(items)
    if N == 0:
        return EmulatedOutcome(None, False, 0.0)
    t = min(t, N)
    cfg = ledger.cfg
    cost = ledger.charge(name, cfg.c_grover * math.ceil(math.sqrt(N / t)) * ledger.reps * item_cost)
    marked = [v for v in items if pred(v)]
    if not marked:
        return EmulatedOutcome(None, False, cost)
    if ledger.injected_failure():
        return EmulatedOutcome(None, True, cost)
    if ledger.rng.random() >= grover_hit_probability(len(marked), t, N, ledger.reps):
        return EmulatedOutcome(None, False, cost)
    return EmulatedOutcome(ledger.rng.choice(marked), False, cost)


def exact_grover(ledger: CostLedger, items: Sequence, pred: Callable, t: int,
                 item_cost: float = 1.0, name: str = "exact_grover") -> EmulatedOutcome:
    """Exact search under the promise that either none or exactly ``t`` items are marked."""
    N = len(items)
    if not 1 <= t <= N:
        raise ValueError(f"exact search needs 1 <= t <= N, got t={t}, N={N}")
    cost = ledger.charge(name, ledger.cfg.c_exact * math.ceil(math.sqrt(N / t)) * item_cost)
    marked = [v for v in items if pred(v)]
    if len(marked) not in (0, t):
        raise PromiseViolation(f"{len(marked)} marked items, promised 0 or {t}")
    value = ledger.rng.choice(marked) if marked else None
    return EmulatedOutcome(value, False, cost)


def approx_count(ledger: CostLedger, items: Sequence, pred: Callable,
                 item_cost: float = 1.0, name: str = "count") -> EmulatedOutcome:
    """Estimate of the number of marked items within relative error 1/10."""
    N = len(items)
    cost = ledger.charge(
        name, ledger.cfg.c_count * math.ceil(math.sqrt(N)) * ledger.reps * item_cost)
    t = sum(1 for v in items if pred(v))
    if t == 0:
        return EmulatedOutcome(0, False, cost)
    if ledger.injected_failure():
        return EmulatedOutcome(ledger.rng.randint(0, N), True, cost)
    lo, hi = math.ceil(t - t / 10), math.floor(t + t / 10)
    return EmulatedOutcome(ledger.rng.randint(lo, hi), False, cost)


def amplify(ledger: CostLedger, branches: Sequence[tuple[float, Any, bool]], p: float,
            per_call_cost: float, name: str = "amplify") -> EmulatedOutcome:
    """Amplitude amplification of a subroutine given by its exact output distribution.

    ``branches`` lists ``(probability, value, is_success)``.  With true success
    probability q >= p the success branch is returned; for 0 < q < p only with
    probability q/p.
    """
    if not 0 < p <= 1:
        raise ValueError(f"success lower bound must lie in (0, 1], got {p}")
    calls = math.ceil(ledger.cfg.c_amplify / math.sqrt(p)) * ledger.reps
    cost = ledger.charge(name, calls * per_call_cost)
    good = [(w, v) for w, v, ok in branches if ok and w > 0]
    q = sum(w for w, _ in good)
    if q <= 0:
        return EmulatedOutcome(None, False, cost)
    if ledger.injected_failure():
        return EmulatedOutcome(None, True, cost)
    if q < p and ledger.rng.random() >= q / p:
        return EmulatedOutcome(None, False, cost)
    r = ledger.rng.random() * q
    for w, v in good:
        r -= w
        if r <= 0:
            return EmulatedOutcome(v, False, cost)
    return EmulatedOutcome(good[-1][1], False, cost)


def _read(ledger: CostLedger, x: GridInput, c: Cell):
    ledger.classical()
    return x[c]


def _result(x: GridInput, output: int, ledger: CostLedger, aborted: bool = False) -> RunResult:
    return RunResult(int(output), ledger.classical_queries, None, aborted, ledger)


def _path_defect(x: GridInput, a: Cell, j: int, back) -> bool:
    """True if the T(j) walk from ``a`` does not end on a proper leaf of column j."""
    cell = a
    for d in build_tree(x.m).paths[j]:
        e = x[cell]
        cell = e.left if d is Direction.LEFT else e.right
        if cell is None:
            return True
    if cell.col != j or x[cell].value != 0:
        return True
    return back is not None and x[cell].aux != back


def _path_cost(m: int) -> int:
    return max(build_tree(m).depth) + 1


# --------------------------------------------------------------------------
# f: bounded-error search with counting and amplification


def _verify_column_q(ledger: CostLedger, x: GridInput, j: int) -> int:
    n, m = x.n, x.m
    rows = list(range(1, n + 1))
    found = grover_find(ledger, rows, lambda i: x[i, j].left is not None or x[i, j].right is not None)
    if found.value is None:
        return 0
    a = Cell(found.value, j)
    if _read(ledger, x, a).value == 0:
        return 0
    others = [i for i in rows if i != a.row]
    if grover_find(ledger, others, lambda i: x[i, j] != ONES).value is not None:
        return 0
    cols = [c for c in range(1, m + 1) if c != j]
    bad = grover_find(ledger, cols, lambda c: _path_defect(x, a, c, j), item_cost=_path_cost(m))
    return int(bad.value is None)


def _find_good_back_pointer(ledger: CostLedger, x: GridInput, j: int, k: int):
    """Exact output distribution and per-call cost of one FindGoodBackPointer(j, k)."""
    n = x.n
    cfg = ledger.cfg
    t = max(1, math.ceil(k / 2))
    zeros = [i for i in range(1, n + 1) if x[i, j].value == 0]
    per_call = (cfg.c_grover * math.ceil(math.sqrt(n / max(1, min(k, n)))) * ledger.reps
                + 1 + cfg.c_grover * math.ceil(math.sqrt(n / min(t, n))) * ledger.reps)
    branches = []
    if not zeros:
        return [(1.0, None, False)], per_call
    w = 1 / len(zeros)
    for i in zeros:
        c = x[i, j].aux
        if c is None:
            branches.append((w, None, False))
            continue
        z = sum(1 for e in x.column(c) if e.value == 0)
        hit = grover_hit_probability(z, t, n, ledger.reps)
        branches.append((w * (1 - hit), c, True))
        branches.append((w * hit, c, False))
    return branches, per_call


def run_Q_f(x: GridInput, cfg: Optional[LabConfig] = None, seed: int = 0) -> RunResult:
    if x.family != "f":
        raise ValueError("run_Q_f evaluates family f")
    ledger = CostLedger(cfg, random.Random(seed))
    n, m = x.n, x.m
    j = ledger.rng.randrange(1, m + 1)
    limit = math.ceil(10 * math.log2(max(n, 2)))
    for _ in range(limit):
        rows = list(range(1, n + 1))
        k = approx_count(ledger, rows, lambda i: x[i, j].value == 0).value
        if k == 0:
            return _result(x, _verify_column_q(ledger, x, j), ledger)
        branches, per_call = _find_good_back_pointer(ledger, x, j, k)
        out = amplify(ledger, branches, min(1.0, 1 / (2 * k)), per_call)
        if out.value is not None:
            j = out.value
    return _result(x, 0, ledger, aborted=True)


# --------------------------------------------------------------------------
# h: bounded error and exact


def _all_ones(x: GridInput, j: int) -> bool:
    return all(e.value == 1 for e in x.column(j))


def run_Q_h(x: GridInput, cfg: Optional[LabConfig] = None, seed: int = 0) -> RunResult:
    if x.family != "h":
        raise ValueError("run_Q_h evaluates family h")
    ledger = CostLedger(cfg, random.Random(seed))
    n, m, k = x.n, x.m, x.k
    cfg = ledger.cfg
    col_cost = cfg.c_grover * math.ceil(math.sqrt(n)) * ledger.reps
    hit = grover_find(ledger, list(range(1, m + 1)), lambda c: _all_ones(x, c), t=k,
                      item_cost=col_cost)
    if hit.value is None:
        return _result(x, 0, ledger)
    j = hit.value
    rows = list(range(1, n + 1))
    found = grover_find(ledger, rows, lambda i: x[i, j] != ONES)
    if found.value is None:
        return _result(x, 0, ledger)
    a = Cell(found.value, j)
    if grover_find(ledger, [i for i in rows if i != a.row],
                   lambda i: x[i, j] != ONES).value is not None:
        return _result(x, 0, ledger)
    head = _read(ledger, x, a)
    cycle = [a]
    cur = head
    for _ in range(k):
        nxt = cur.aux
        if nxt is None:
            return _result(x, 0, ledger)
        if nxt == a:
            break
        if nxt in cycle:
            return _result(x, 0, ledger)
        cur = _read(ledger, x, nxt)
        if cur.value != 1 or (cur.left, cur.right) != (head.left, head.right):
            return _result(x, 0, ledger)
        cycle.append(nxt)
    else:
        return _result(x, 0, ledger)
    if len(cycle) != k or len({c.col for c in cycle}) != k:
        return _result(x, 0, ledger)
    specials = set(cycle)
    rest = [Cell(i, c.col) for c in cycle for i in rows if Cell(i, c.col) not in specials]
    if grover_find(ledger, rest, lambda c: x[c] != ONES).value is not None:
        return _result(x, 0, ledger)
    marked = {c.col for c in cycle}
    cols = [c for c in range(1, m + 1) if c not in marked]
    bad = grover_find(ledger, cols, lambda c: _path_defect(x, a, c, None), item_cost=_path_cost(m))
    return _result(x, int(bad.value is None), ledger)


def _full_scan(x: GridInput, ledger: CostLedger) -> RunResult:
    ledger.classical(x.n * x.m)
    return _result(x, evaluate(x), ledger)


def run_QE_h(x: GridInput, cfg: Optional[LabConfig] = None, seed: int = 0) -> RunResult:
    """Zero-error evaluation of h by exact search plus classical checking."""
    if x.family != "h":
        raise ValueError("run_QE_h evaluates family h")
    ledger = CostLedger(cfg, random.Random(seed))
    n, m, k = x.n, x.m, x.k
    try:
        hit = exact_grover(ledger, list(range(1, m + 1)), lambda c: _all_ones(x, c), t=k,
                           item_cost=n)
    except PromiseViolation:
        return _full_scan(x, ledger)
    if hit.value is None:
        return _result(x, 0, ledger)
    read = Reader(_LedgerOracle(x, ledger))

    def special(col: int) -> Optional[Cell]:
        odd = [Cell(i, col) for i, e in enumerate(read.column(col), 1) if e != ONES]
        if len(odd) != 1 or any(e.value != 1 for e in read.column(col)):
            return None
        return odd[0]

    a = special(hit.value)
    if a is None:
        return _result(x, 0, ledger)
    head = read(a)
    cycle = [a]
    cur = head
    while True:
        nxt = cur.aux
        if nxt is None or len(cycle) > k:
            return _result(x, 0, ledger)
        if nxt == a:
            break
        if nxt in cycle or special(nxt.col) != nxt:
            return _result(x, 0, ledger)
        cur = read(nxt)
        if (cur.left, cur.right) != (head.left, head.right):
            return _result(x, 0, ledger)
        cycle.append(nxt)
    if len(cycle) != k:
        return _result(x, 0, ledger)
    marked = {c.col for c in cycle}
    t = build_tree(m)
    for col in range(1, m + 1):
        if col in marked:
            continue
        cell = a
        for d in t.paths[col]:
            e = read(cell)
            cell = e.left if d is Direction.LEFT else e.right
            if cell is None:
                return _result(x, 0, ledger)
        if cell.col != col or read(cell).value != 0:
            return _result(x, 0, ledger)
    return _result(x, 1, ledger)


class _LedgerOracle:
    """Classical oracle that books every query on a ledger."""

    def __init__(self, x: GridInput, ledger: CostLedger):
        self.x = x
        self.n, self.m = x.n, x.m
        self.ledger = ledger

    @property
    def queries(self) -> int:
        return self.ledger.classical_queries

    def query(self, c):
        self.ledger.classical()
        return self.x[c]


# --------------------------------------------------------------------------
# g: exact search over the good-column indicator


def good_column_costs(x: GridInput) -> list[tuple[bool, int]]:
    """(is good, queries used) of the deterministic good-column test for every column."""
    out = []
    for j in range(1, x.m + 1):
        o = CountingOracle(x)
        ok = _good_column(Reader(o), j)
        out.append((ok, o.queries))
    return out


def run_QE_g(x: GridInput, cfg: Optional[LabConfig] = None, seed: int = 0) -> RunResult:
    """Exact evaluation of g: Deutsch-Jozsa style search for a good column."""
    if x.family != "g":
        raise ValueError("run_QE_g evaluates family g")
    ledger = CostLedger(cfg, random.Random(seed))
    m = x.m
    tests = good_column_costs(x)
    item_cost = max(q for _, q in tests)
    try:
        hit = exact_grover(ledger, list(range(1, m + 1)), lambda c: tests[c - 1][0],
                           t=m // 2, item_cost=item_cost)
    except PromiseViolation:
        return _full_scan(x, ledger)
    return _result(x, int(hit.value is not None), ledger)
