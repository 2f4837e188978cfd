"""Query-counting oracles, the column-count adversary, and lower-bound potentials."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Union

from .functions import (
    GridInput, HardSampleG, HardSampleH1, evaluate, make_grid,
)
from .grid import ONES, ZERO, Cell, Entry, build_tree


class InconsistentTranscript(ValueError):
    pass


class Infeasible(Exception):
    """The adversary can no longer keep a positive completion available."""


class Transcript:
    """Ordered (cell, answer) pairs with per-column counts."""

    def __init__(self, n: int, m: int, pairs: Iterable[tuple[Cell, Entry]] = ()):
        self.n = n
        self.m = m
        self.pairs: list[tuple[Cell, Entry]] = []
        self.column_counts = [0] * (m + 1)
        for c, e in pairs:
            self.append(c, e)

    def append(self, c: Cell, e: Entry) -> None:
        self.pairs.append((Cell(*c), e))
        self.column_counts[c[1]] += 1

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[Cell, Entry]]:
        return iter(self.pairs)

    def answered(self) -> dict[Cell, Entry]:
        return dict(self.pairs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Transcript):
            return NotImplemented
        return (self.n, self.m, self.pairs) == (other.n, other.m, other.pairs)

    __hash__ = None


def _check_cell(c, n: int, m: int) -> None:
    if not (1 <= c[0] <= n and 1 <= c[1] <= m):
        raise IndexError(f"cell {tuple(c)} outside the {n}x{m} grid")


class CountingOracle:
    """Answers queries from a hidden input and counts them.

    Repeats are counted again unless ``dedup`` is set.
    """

    def __init__(self, hidden: GridInput, dedup: bool = False):
        self.hidden = hidden
        self.n = hidden.n
        self.m = hidden.m
        self.dedup = dedup
        self.transcript = Transcript(hidden.n, hidden.m)
        self.queries = 0
        self._seen: set[Cell] = set()

    def query(self, c: tuple[int, int]) -> Entry:
        _check_cell(c, self.n, self.m)
        e = self.hidden.rows[c[0] - 1][c[1] - 1]
        if self.dedup:
            if c in self._seen:
                return e
            self._seen.add(c)
        self.queries += 1
        self.transcript.append(c, e)
        return e

    @property
    def column_counts(self) -> list[int]:
        return self.transcript.column_counts


# --------------------------------------------------------------------------
# deterministic lower bound: the column-count adversary


class AdversaryState:
    """First ``m`` answers in a column are (1, null, null, null), the (m+t)-th is (0, null, null, t).

    For ``n > 2m`` the column pointer wraps modulo ``m`` so it stays a valid column.
    """

    def __init__(self, n: int, m: int):
        if n <= m:
            raise ValueError(f"the adversary needs n > m, got n={n}, m={m}")
        self.n = n
        self.m = m
        self.transcript = Transcript(n, m)
        self._answers: dict[Cell, Entry] = {}

    def answer(self, c: tuple[int, int]) -> Entry:
        _check_cell(c, self.n, self.m)
        c = Cell(*c)
        if c in self._answers:
            return self._answers[c]
        k = self.transcript.column_counts[c.col] + 1
        e = ONES if k <= self.m else Entry(0, None, None, (k - self.m - 1) % self.m + 1)
        self._answers[c] = e
        self.transcript.append(c, e)
        return e

    query = answer

    @property
    def queries(self) -> int:
        return len(self.transcript)

    @classmethod
    def replay(cls, transcript: Iterable[tuple[Cell, Entry]], n: int, m: int) -> "AdversaryState":
        s = cls(n, m)
        for c, e in transcript:
            if s.answer(c) != e:
                raise InconsistentTranscript(f"answer at {tuple(c)} is not the adversary's")
        return s


def _answered(transcript, n: int, m: int) -> dict[Cell, Entry]:
    if isinstance(transcript, AdversaryState):
        transcript = transcript.transcript
    return AdversaryState.replay(transcript, n, m)._answers


def complete_to_negative(transcript, n: int, m: int) -> GridInput:
    """Answer every unqueried cell with (0, null, null, null)."""
    answered = _answered(transcript, n, m)
    x = make_grid("f", n, m, 1, fill=ZERO)
    return x.replace(answered) if answered else x


def complete_to_positive(transcript, n: int, m: int) -> GridInput:
    """Positive input consistent with the adversary's answers so far.

    Needs a column with at most ``m`` queried cells and at least ``4m`` unqueried
    cells overall; raises :class:`Infeasible` otherwise.  Free choices are made
    lowest-index first (row-major) for determinism.
    """
    answered = _answered(transcript, n, m)
    counts = [0] * (m + 1)
    for c in answered:
        counts[c.col] += 1
    if n * m - len(answered) < 4 * m:
        raise Infeasible(f"only {n * m - len(answered)} unqueried cells left (< 4m)")
    cands = [b for b in range(1, m + 1) if counts[b] <= m]
    if not cands:
        raise Infeasible("every column has more than m queried cells")
    t = build_tree(m)

    for b in cands:
        leaves: dict[int, Cell] = {}
        for j in range(1, m + 1):
            if j == b:
                continue
            fresh = [Cell(i, j) for i in range(1, n + 1) if Cell(i, j) not in answered]
            if fresh:
                leaves[j] = fresh[0]
                continue
            hit = [c for c, e in answered.items() if c.col == j and e.value == 0 and e.aux == b]
            if not hit:
                break
            leaves[j] = min(hit)
        else:
            special = next((Cell(i, b) for i in range(1, n + 1) if Cell(i, b) not in answered), None)
            if special is None:
                continue
            taken = set(leaves.values())
            free = (Cell(i, j) for i in range(1, n + 1) for j in range(1, m + 1)
                    if j != b and Cell(i, j) not in answered and Cell(i, j) not in taken)
            where: dict[int, Cell] = {0: special}
            for v in range(1, m - 1):
                c = next(free, None)
                if c is None:
                    break
                where[v] = c
            else:
                for j, c in leaves.items():
                    where[t.leaf_node[j]] = c
                updates: dict[Cell, Entry] = {}
                for j, c in leaves.items():
                    if c not in answered:
                        updates[c] = Entry(0, None, None, b)
                for v in range(m - 1):
                    lft, rgt = (where.get(u) for u in t.children(v))
                    updates[where[v]] = Entry(1 if v == 0 else 0, lft, rgt, None)
                x = make_grid("f", n, m, 1, answered)
                return x.replace(updates)
    raise Infeasible("no column admits a consistent positive completion")


# --------------------------------------------------------------------------
# strategies and the game


def _row_major(n: int, m: int) -> list[Cell]:
    return [Cell(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]


def _column_major(n: int, m: int) -> list[Cell]:
    return [Cell(i, j) for j in range(1, m + 1) for i in range(1, n + 1)]


def _random_order(n: int, m: int, seed: int) -> list[Cell]:
    cells = _row_major(n, m)
    random.Random(seed).shuffle(cells)
    return cells


class _Recorder:
    """Adversary front that remembers the order of first-time queries."""

    def __init__(self, adv: AdversaryState):
        self.adv = adv
        self.n, self.m = adv.n, adv.m
        self.order: list[Cell] = []

    @property
    def queries(self) -> int:
        return self.adv.queries

    @property
    def transcript(self) -> Transcript:
        return self.adv.transcript

    def query(self, c) -> Entry:
        if Cell(*c) not in self.adv._answers:
            self.order.append(Cell(*c))
        return self.adv.answer(c)


def _las_vegas_order(n: int, m: int, seed: int) -> list[Cell]:
    """Queries of the seeded R0 evaluator run against the adversary, then the rest row-major."""
    from .classical import AlgoConfig, run_R0_f

    rec = _Recorder(AdversaryState(n, m))
    run_R0_f(rec, AlgoConfig(seed=seed))
    seen = set(rec.order)
    return rec.order + [c for c in _row_major(n, m) if c not in seen]


STRATEGIES = ("column-major", "row-major", "las-vegas", "random-order")


def strategy_order(name: str, n: int, m: int, seed: int = 0) -> list[Cell]:
    """Full query order of a built-in deterministic strategy against the adversary."""
    if name == "column-major":
        return _column_major(n, m)
    if name == "row-major":
        return _row_major(n, m)
    if name == "random-order":
        return _random_order(n, m, seed)
    if name == "las-vegas":
        return _las_vegas_order(n, m, seed)
    raise ValueError(f"unknown strategy {name!r}; choose from {STRATEGIES}")


@dataclass
class GameReport:
    strategy: str
    n: int
    m: int
    first_failure: Optional[int]  # queries made when the positive completion first failed
    undetermined_through: int     # largest t with both completions valid
    witnesses: tuple[GridInput, GridInput]  # (negative, positive) at that t
    problems: list[str] = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.problems and self.undetermined_through >= self.m * self.m - 1


def _consistent(x: GridInput, answered: dict[Cell, Entry]) -> bool:
    return all(x[c] == e for c, e in answered.items())


def play_adversary_game(strategy: str, m: int, n: Optional[int] = None, seed: int = 0,
                        stop_after: Optional[int] = None) -> GameReport:
    """Play a strategy against the adversary, checking both completions after every query."""
    n = 2 * m if n is None else n
    order = strategy_order(strategy, n, m, seed)
    adv = AdversaryState(n, m)
    problems: list[str] = []
    last = None
    through = -1
    failure = None
    limit = len(order) if stop_after is None else min(stop_after, len(order))
    for t in range(limit + 1):
        if t:
            adv.answer(order[t - 1])
        answered = adv._answers
        neg = complete_to_negative(adv, n, m)
        try:
            pos = complete_to_positive(adv, n, m)
        except Infeasible:
            failure = t
            break
        if evaluate(neg) != 0 or not _consistent(neg, answered):
            problems.append(f"t={t}: negative completion invalid")
        if evaluate(pos) != 1 or not _consistent(pos, answered):
            problems.append(f"t={t}: positive completion invalid")
        if problems:
            break
        last = (neg, pos)
        through = t
    return GameReport(strategy, n, m, failure, through, last, problems)


# --------------------------------------------------------------------------
# potentials for the randomized lower bounds


VARIANTS = ("g-lower", "h1-lower")


class PotentialTracker:
    """Compromised-column potential I_t along one run against a hard sample.

    ``g-lower``: I = A + (2/n) B.  ``h1-lower``: compromise also spreads from a
    tree node to every internal node below it, and
    I = min(A + (4 C0 log2 m / n) B, m/2).
    """

    def __init__(self, variant: str, hidden: Union[HardSampleG, HardSampleH1], n: int,
                 c0: float = 3.598):
        if variant == "g-lower":
            if not isinstance(hidden, HardSampleG):
                raise TypeError("g-lower tracks samples of the one-zero-per-column distribution")
            self.m = len(hidden.zero_rows)
            self.weight = 2.0 / n
            self.cap = math.inf
        elif variant == "h1-lower":
            if not isinstance(hidden, HardSampleH1):
                raise TypeError("h1-lower tracks samples of the h1 tree distribution")
            self.m = len(hidden.leaf_rows)
            self.weight = 4.0 * c0 * math.log2(self.m) / n
            self.cap = self.m / 2
            self._node_of = [None] * (self.m + 1)
            for u, col in enumerate(hidden.pi):
                self._node_of[col] = u
        else:
            raise ValueError(f"unknown variant {variant!r}")
        self.variant = variant
        self.hidden = hidden
        self.n = n
        self.compromised = [False] * (self.m + 1)
        self._count = [0] * (self.m + 1)
        self._in_b = [0] * (self.m + 1)
        self._seen: set[tuple[int, int]] = set()
        self.A = 0
        self.B = 0
        self.t = 0
        self.I = 0.0

    def _compromise(self, j: int) -> None:
        self.compromised[j] = True
        self.A += 1
        self.B -= self._in_b[j]
        self._in_b[j] = 0

    def _hits(self, i: int, j: int) -> bool:
        h = self.hidden
        if self.variant == "g-lower":
            return i == h.zero_rows[j - 1]
        return i == h.leaf_rows[j - 1] or i == h.node_rows[j - 1]

    def step(self, c: tuple[int, int]) -> float:
        self.t += 1
        if c in self._seen:
            return self.I
        self._seen.add(c)
        i, j = c
        self._count[j] += 1
        if self.compromised[j]:
            return self.I
        if self._hits(i, j) or 2 * self._count[j] > self.n:
            self._compromise(j)
            if self.variant == "h1-lower" and self._node_of[j] is not None:
                pi = self.hidden.pi
                stack = [self._node_of[j]]
                while stack:
                    u = stack.pop()
                    for v in (2 * u + 1, 2 * u + 2):
                        if v < self.m - 1:
                            if not self.compromised[pi[v]]:
                                self._compromise(pi[v])
                            stack.append(v)
        else:
            self.B += 1
            self._in_b[j] += 1
        self.I = min(self.A + self.weight * self.B, self.cap)
        return self.I


def hidden_entry(hidden: Union[HardSampleG, HardSampleH1], grid: Optional[GridInput],
                 c: tuple[int, int]) -> Entry:
    if isinstance(hidden, HardSampleG):
        return ZERO if c[0] == hidden.zero_rows[c[1] - 1] else ONES
    return grid[c]


POTENTIAL_STRATEGIES = ("column-scan", "column-major", "row-major", "random-order")


def potential_strategy(name: str, n: int, m: int, seed: int = 0) -> Callable:
    """Returns ``next_cell(answer_of_last_query) -> Cell | None`` factories.

    ``column-scan`` walks down each column and jumps to the next one as soon as
    it sees a zero; the others are fixed orders.
    """
    if name == "column-scan":
        def factory():
            state = {"i": 1, "j": 1}

            def nxt(last: Optional[Entry]):
                if last is not None:
                    if last.value == 0 or state["i"] > n:
                        state["i"], state["j"] = 1, state["j"] + 1
                if state["j"] > m:
                    return None
                c = Cell(state["i"], state["j"])
                state["i"] += 1
                return c
            return nxt
        return factory
    if name in ("column-major", "row-major", "random-order"):
        order = strategy_order(name, n, m, seed)

        def factory():
            it = iter(order)
            return lambda last: next(it, None)
        return factory
    raise ValueError(f"unknown strategy {name!r}; choose from {POTENTIAL_STRATEGIES}")


@dataclass
class DriftReport:
    variant: str
    n: int
    m: int
    strategy: str
    samples: int
    bound: float
    means: list[float]
    stderrs: list[float]
    initial: float

    @property
    def max_mean(self) -> float:
        return max(self.means) if self.means else 0.0

    @property
    def worst_step(self) -> int:
        return max(range(len(self.means)), key=lambda t: self.means[t] - 3 * self.stderrs[t])

    @property
    def holds(self) -> bool:
        return self.initial == 0 and all(
            mu <= self.bound + 3 * se + 1e-12 for mu, se in zip(self.means, self.stderrs))


def estimate_drift(variant: str, n: int, m: int, strategy: str = "column-scan",
                   samples: int = 10_000, seed: int = 0, c0: float = 3.598,
                   steps: Optional[int] = None) -> DriftReport:
    """Per-step mean and standard error of I_{t+1} - I_t over fresh hard samples."""
    steps = n * m if steps is None else steps
    rng = random.Random(seed)
    factory = potential_strategy(strategy, n, m, seed)
    sums = [0.0] * steps
    sq = [0.0] * steps
    initial = 0.0
    for _ in range(samples):
        if variant == "g-lower":
            hidden = HardSampleG.draw(n, m, rng)
            grid = None
        elif variant == "h1-lower":
            hidden = HardSampleH1.draw(n, m, rng)
            grid = hidden.to_grid(n)
        else:
            raise ValueError(f"unknown variant {variant!r}")
        tr = PotentialTracker(variant, hidden, n, c0)
        initial = max(initial, tr.I)
        nxt = factory()
        last = None
        prev = tr.I
        for t in range(steps):
            c = nxt(last)
            if c is None:
                break
            cur = tr.step(c)
            d = cur - prev
            prev = cur
            sums[t] += d
            sq[t] += d * d
            last = hidden_entry(hidden, grid, c)
    means = [s / samples for s in sums]
    stderrs = []
    for s, q in zip(means, sq):
        var = max(q / samples - s * s, 0.0) * samples / max(samples - 1, 1)
        stderrs.append(math.sqrt(var / samples))
    if variant == "g-lower":
        bound = 4.0 / n
    else:
        bound = 8.0 * c0 * math.log2(m) / n
    return DriftReport(variant, n, m, strategy, samples, bound, means, stderrs, initial)
