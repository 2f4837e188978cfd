"""Brute-force query measures of small explicit functions."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

MAX_BITS = 24


class SizeBoundExceeded(ValueError):
    pass


class TableParseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TruthTable:
    """Function of ``N`` variables over alphabet ``{0..s-1}`` stored as an ``(s,)*N`` array.

    Inputs are ordered lexicographically with x1 the most significant digit.
    """

    N: int
    s: int
    values: np.ndarray

    def __post_init__(self):
        check_size(self.N, self.s)
        if self.values.shape != (self.s,) * self.N:
            raise ValueError(f"value array has shape {self.values.shape}, "
                             f"expected {(self.s,) * self.N}")
        if not np.isin(self.values, (0, 1)).all():
            raise ValueError("truth table values must be bits")

    @classmethod
    def from_bits(cls, N: int, s: int, bits: Sequence[int]) -> "TruthTable":
        check_size(N, s)
        arr = np.asarray(list(bits), dtype=np.int8)
        if arr.size != s ** N:
            raise ValueError(f"expected {s ** N} values, got {arr.size}")
        return cls(N, s, arr.reshape((s,) * N))

    @classmethod
    def from_function(cls, N: int, s: int, fn: Callable[[tuple[int, ...]], int]) -> "TruthTable":
        check_size(N, s)
        return cls.from_bits(N, s, [int(fn(x)) for x in itertools.product(range(s), repeat=N)])

    def bits(self) -> str:
        return "".join(str(int(v)) for v in self.values.reshape(-1))

    def __call__(self, x: Sequence[int]) -> int:
        return int(self.values[tuple(x)])

    def __eq__(self, other) -> bool:
        return (isinstance(other, TruthTable) and (self.N, self.s) == (other.N, other.s)
                and np.array_equal(self.values, other.values))

    def permute(self, perm: Sequence[int]) -> "TruthTable":
        """Table of x -> f(y) with y[perm[i]] = x[i]."""
        return TruthTable(self.N, self.s, np.transpose(self.values, np.argsort(perm)).copy())

    def complement_inputs(self, mask: Sequence[bool]) -> "TruthTable":
        """Reverse the alphabet (x -> s-1-x) on every variable flagged in ``mask``."""
        idx = tuple(slice(None, None, -1) if f else slice(None) for f in mask)
        return TruthTable(self.N, self.s, self.values[idx].copy())


def check_size(N: int, s: int) -> None:
    if N < 0 or s < 2:
        raise ValueError(f"need N >= 0 and s >= 2, got N={N}, s={s}")
    if N * math.log2(s) > MAX_BITS:
        raise SizeBoundExceeded(f"N log2 s = {N * math.log2(s):.1f} exceeds {MAX_BITS}")


# --------------------------------------------------------------------------
# standard tables


def or_table(N: int) -> TruthTable:
    return TruthTable.from_function(N, 2, lambda x: any(x))


def parity_table(N: int) -> TruthTable:
    return TruthTable.from_function(N, 2, lambda x: sum(x) % 2)


def majority_table(N: int) -> TruthTable:
    return TruthTable.from_function(N, 2, lambda x: 2 * sum(x) > N)


def nand_tree_table(depth: int) -> TruthTable:
    def nand(bits):
        if len(bits) == 1:
            return bits[0]
        h = len(bits) // 2
        return 1 - (nand(bits[:h]) & nand(bits[h:]))
    return TruthTable.from_function(2 ** depth, 2, lambda x: nand(list(x)))


def random_table(N: int, s: int, rng: random.Random, p: Optional[float] = None) -> TruthTable:
    p = rng.random() if p is None else p
    return TruthTable.from_bits(N, s, [int(rng.random() < p) for _ in range(s ** N)])


# --------------------------------------------------------------------------
# measures


def _is_constant(arr: np.ndarray) -> bool:
    return arr.size == 0 or bool(arr.min() == arr.max())


def _depth(arr: np.ndarray, memo: Optional[dict]) -> int:
    if _is_constant(arr):
        return 0
    if memo is not None:
        key = (arr.shape, arr.tobytes())
        hit = memo.get(key)
        if hit is not None:
            return hit
    best = arr.ndim
    for ax in range(arr.ndim):
        worst = 0
        for v in range(arr.shape[ax]):
            worst = max(worst, _depth(np.take(arr, v, axis=ax), memo))
            if 1 + worst >= best:
                break
        best = min(best, 1 + worst)
    if memo is not None:
        memo[key] = best
    return best


def exact_D(f: TruthTable, memo: bool = True) -> int:
    """Deterministic query complexity by minimax over restrictions."""
    check_size(f.N, f.s)
    return _depth(np.ascontiguousarray(f.values), {} if memo else None)


def certificate_complexity(f: TruthTable, b: int) -> int:
    """C_b(f): worst case over f^-1(b) of the smallest forcing sub-assignment (0 if empty)."""
    check_size(f.N, f.s)
    arr = f.values
    best = 0
    subsets = [S for r in range(f.N + 1) for S in itertools.combinations(range(f.N), r)]
    for x in itertools.product(range(f.s), repeat=f.N):
        if arr[x] != b:
            continue
        for S in subsets:
            if len(S) < best:
                continue
            idx = tuple(x[i] if i in S else slice(None) for i in range(f.N))
            if (arr[idx] == b).all():
                best = max(best, len(S))
                break
    return best


def mobius_coefficients(f: TruthTable) -> np.ndarray:
    """Coefficients of the multilinear expansion, indexed like the table by subset indicator."""
    if f.s != 2:
        raise ValueError("the polynomial degree needs a boolean alphabet")
    check_size(f.N, f.s)
    a = f.values.astype(np.int64)
    for ax in range(f.N):
        lo = np.take(a, 0, axis=ax)
        hi = np.take(a, 1, axis=ax) - lo
        a = np.stack([lo, hi], axis=ax)
    return a


def degree(f: TruthTable) -> int:
    coeffs = mobius_coefficients(f)
    nz = np.argwhere(coeffs != 0)
    return int(nz.sum(axis=1).max()) if len(nz) else 0


def all_measures(f: TruthTable) -> dict[str, int]:
    out = {"D": exact_D(f), "C0": certificate_complexity(f, 0),
           "C1": certificate_complexity(f, 1)}
    if f.s == 2:
        out["deg"] = degree(f)
    return out


# --------------------------------------------------------------------------
# file format: "N s" then the s^N value bits on one line


def dump_table(f: TruthTable) -> str:
    return f"{f.N} {f.s}\n{f.bits()}\n"


def load_table(text: str) -> TruthTable:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if len(lines) != 2:
        raise TableParseError("expected two lines: 'N s' and the value bits")
    head = lines[0].split()
    try:
        N, s = int(head[0]), int(head[1])
    except (ValueError, IndexError) as exc:
        raise TableParseError(f"bad header {lines[0]!r}") from exc
    if len(head) != 2:
        raise TableParseError(f"bad header {lines[0]!r}")
    check_size(N, s)
    bits = lines[1]
    if len(bits) != s ** N or set(bits) - {"0", "1"}:
        raise TableParseError(f"expected {s ** N} bits, got {len(bits)} characters")
    return TruthTable.from_bits(N, s, [int(c) for c in bits])
