import itertools
import random

import numpy as np
import pytest

from pointerlab.measures import (
    SizeBoundExceeded, TableParseError, TruthTable, all_measures, certificate_complexity,
    check_size, degree, dump_table, exact_D, load_table, majority_table, mobius_coefficients,
    nand_tree_table, or_table, parity_table, random_table,
)

from oracles import naive_degree, naive_depth


def as_dict(f):
    return {z: int(f(z)) for z in itertools.product(range(f.s), repeat=f.N)}


def corpus(count=50, seed=0):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        s = 2 if i % 3 else 3
        N = rng.randint(1, 4) if s == 2 else rng.randint(1, 3)
        out.append(random_table(N, s, rng))
    return out


@pytest.mark.parametrize("f,want", [
    (or_table(3), 3), (parity_table(4), 4), (nand_tree_table(2), 4),
])
def test_decision_tree_examples(f, want):
    assert exact_D(f) == want


def test_certificate_examples():
    assert certificate_complexity(or_table(5), 1) == 1
    assert certificate_complexity(or_table(3), 0) == 3
    assert certificate_complexity(majority_table(3), 1) == 2


def test_certificate_empty_preimage():
    const = TruthTable.from_bits(2, 2, [1, 1, 1, 1])
    assert certificate_complexity(const, 0) == 0


def test_degree_examples():
    assert degree(parity_table(4)) == 4
    assert degree(TruthTable.from_bits(3, 2, [0] * 8)) == 0
    maj = majority_table(3)
    assert degree(maj) == 3
    assert mobius_coefficients(maj)[1, 1, 1] == -2


def test_degree_rejects_nonboolean():
    with pytest.raises(ValueError):
        degree(random_table(2, 3, random.Random(0)))


def test_measures_match_naive_oracles():
    for f in corpus():
        d = as_dict(f)
        assert exact_D(f) == naive_depth(d, f.N, f.s)
        if f.s == 2:
            assert degree(f) == naive_degree(d, f.N)


def test_ordering_on_corpus():
    for f in corpus():
        m = all_measures(f)
        assert m["C0"] <= m["D"] and m["C1"] <= m["D"]
        if "deg" in m:
            assert m["deg"] <= m["D"]


def test_memo_agrees():
    for f in corpus(30, seed=1):
        assert exact_D(f, memo=True) == exact_D(f, memo=False)


def test_invariant_under_permutation_and_complement():
    rng = random.Random(4)
    for f in corpus(30, seed=2):
        perm = list(range(f.N))
        rng.shuffle(perm)
        mask = [rng.random() < 0.5 for _ in range(f.N)]
        g = f.permute(perm).complement_inputs(mask)
        assert exact_D(g) == exact_D(f)


def test_permute_semantics():
    f = TruthTable.from_function(3, 2, lambda x: x[0] & (1 - x[2]))
    g = f.permute([2, 1, 0])
    for z in itertools.product((0, 1), repeat=3):
        y = [0] * 3
        for i, p in enumerate([2, 1, 0]):
            y[p] = z[i]
        assert g(z) == f(tuple(y))


def test_table_roundtrip():
    for f in corpus(20, seed=3):
        assert load_table(dump_table(f)) == f
    assert dump_table(or_table(2)) == "2 2\n0111\n"


@pytest.mark.parametrize("text", ["", "2 2\n011\n", "2\n0111\n", "2 2\n01x1\n", "a b\n0\n",
                                  "2 2 1\n0111\n"])
def test_table_parse_errors(text):
    with pytest.raises(TableParseError):
        load_table(text)


def test_size_bound():
    check_size(24, 2)
    check_size(12, 4)
    with pytest.raises(SizeBoundExceeded):
        check_size(25, 2)
    with pytest.raises(SizeBoundExceeded):
        check_size(16, 3)
    with pytest.raises(SizeBoundExceeded):
        load_table("25 2\n0\n")


def test_bad_table_shape():
    with pytest.raises(ValueError):
        TruthTable(2, 2, np.zeros((2, 3), dtype=np.int8))
