import random

import pytest

from pointerlab import classical as cl
from pointerlab.adversary import CountingOracle
from pointerlab.classical import (
    DEFAULT_ALPHA, AlgoConfig, Reader, calibrate_alpha, good_column_budget, halving_path,
    miss_probability, run_good_column, run_R0_f, run_R1_g, sample_count, verify_column,
)
from pointerlab.functions import (
    evaluate, generate_positive, make_grid, mutate_one, sample_hard_negative,
)
from pointerlab.grid import ONES, ZERO, Cell, Entry

from oracles import reference_good


def _oracle(x):
    return CountingOracle(x)


def test_reader_memoizes():
    o = _oracle(generate_positive("f", 4, 4, seed=0))
    r = Reader(o)
    r((1, 1))
    r(Cell(1, 1))
    assert o.queries == 1


def test_verify_column_on_marked_column():
    x = generate_positive("f", 8, 8, seed=3, garbage="random")
    b = next(j for j in range(1, 9) if all(e.value == 1 for e in x.column(j)))
    assert verify_column(_oracle(x), b) == 1
    others = [j for j in range(1, 9) if j != b]
    assert all(verify_column(_oracle(x), j) == 0 for j in others)


def test_verify_column_rejects_all_ones():
    assert verify_column(_oracle(make_grid("f", 4, 4)), 2) == 0


def test_verify_column_rejects_broken_back_pointer():
    x = generate_positive("f", 6, 6, seed=1)
    b = next(j for j in range(1, 7) if all(e.value == 1 for e in x.column(j)))
    leaf = next(c for c, e in x.cells() if e.value == 0 and e.aux == b)
    y = x.replace({leaf: x[leaf]._replace(aux=b % 6 + 1)})
    assert verify_column(_oracle(y), b) == 0


def test_sample_count_formula():
    import math
    assert sample_count(3.75, 64, 64, 8) == math.ceil(3.75 * 8 * math.log(64 * 64))
    assert sample_count(3.75, 64, 64, 0) == 64


def test_test_column_ones_and_zero():
    rng = random.Random(0)
    assert cl.test_column(_oracle(make_grid("f", 64, 64)), 5, 8, rng)
    assert not cl.test_column(_oracle(make_grid("f", 64, 64, fill=ZERO)), 5, 8, rng)


def test_test_column_full_scan_when_cheap():
    x = make_grid("f", 16, 4, updates={(16, 2): ZERO})
    o = _oracle(x)
    assert not cl.test_column(o, 2, 16, random.Random(0))
    assert o.queries == 16


def test_test_column_monte_carlo():
    n = m = 64
    k = 8
    rng = random.Random(1)
    rows = rng.sample(range(1, n + 1), k)
    x = make_grid("f", n, m, updates={(i, 3): Entry(0, None, None, None) for i in rows})
    trials = 2000
    passes = sum(cl.test_column(_oracle(x), 3, k, rng) for _ in range(trials))
    # miss chance with 8 zeros is far below the k/2+1 bound, itself < 1/(nm)^2
    assert passes == 0


def test_miss_probability_monotone():
    assert miss_probability(3.0, 10_000, 2, 100) > miss_probability(4.0, 10_000, 2, 100) > 0
    assert miss_probability(3.75, 16, 8, 16) == 0.0


def test_halving_path():
    assert halving_path(16) == [16, 8, 4, 2, 1]
    assert halving_path(1) == [1]


def test_calibrated_alpha_reproduced():
    sizes = [(2 * m, m) for m in (8, 16, 32, 64, 128, 256)] + [(64, 64)]
    assert calibrate_alpha(sizes) == DEFAULT_ALPHA
    bound = lambda n, m: 1 / (n * m) ** 2  # noqa: E731
    assert all(miss_probability(DEFAULT_ALPHA, n, m, k) <= bound(n, m)
               for n, m in sizes for k in halving_path(n))


def test_algo_config_validation():
    with pytest.raises(ValueError):
        AlgoConfig(alpha_sample=0)
    with pytest.raises(ValueError):
        AlgoConfig(max_reps=0)


# ---------------------------------------------------------------- R0

def test_r0_zero_error_small_mix():
    rng = random.Random(3)
    for s in range(600):
        n, m = rng.choice([(8, 4), (16, 8), (8, 8), (12, 6)])
        kind = s % 3
        x = generate_positive("f", n, m, seed=s, garbage="random")
        if kind == 1:
            x = mutate_one(x, rng)
        elif kind == 2:
            x = sample_hard_negative("f", n, m, seed=s)
        r = run_R0_f(_oracle(x), AlgoConfig(seed=s + 10_000))
        assert r.output == evaluate(x), s
        assert r.queries <= n * m and not r.aborted


def test_r0_thousand_seeds_m32():
    x = generate_positive("f", 64, 32, seed=99)
    y = sample_hard_negative("f", 64, 32, seed=99)
    for s in range(1000):
        assert run_R0_f(_oracle(x), AlgoConfig(seed=s)).output == 1
    for s in range(300):
        assert run_R0_f(_oracle(y), AlgoConfig(seed=s)).output == 0


def test_r0_deterministic_given_seed():
    x = generate_positive("f", 32, 16, seed=4, garbage="random")
    a = run_R0_f(_oracle(x), AlgoConfig(seed=7))
    b = run_R0_f(_oracle(x), AlgoConfig(seed=7))
    assert (a.output, a.queries, list(a.transcript)) == (b.output, b.queries, list(b.transcript))


def test_r0_each_cell_at_most_once():
    x = generate_positive("f", 32, 16, seed=5, garbage="random")
    r = run_R0_f(_oracle(x), AlgoConfig(seed=1))
    cells = [c for c, _ in r.transcript]
    assert len(cells) == len(set(cells)) == r.queries


# ---------------------------------------------------------------- good column and R1

@pytest.mark.parametrize("n,m", [(6, 6), (8, 8), (5, 10), (16, 4)])
def test_good_column_matches_reference(n, m):
    rng = random.Random(n * m)
    budget = good_column_budget(n, m)
    for s in range(60):
        x = generate_positive("g", n, m, seed=s, garbage="random" if s % 2 else "ones")
        if s % 3 == 0:
            x = mutate_one(x, rng)
        if s % 5 == 0:
            x = sample_hard_negative("g", n, m, seed=s)
        good = reference_good(x)
        for j in range(1, m + 1):
            o = _oracle(x)
            assert run_good_column(o, j) == (j in good), (s, j)
            assert o.queries <= budget


def test_good_column_transcript_repeatable():
    x = generate_positive("g", 8, 8, seed=2, garbage="random")
    o1, o2 = _oracle(x), _oracle(x)
    run_good_column(o1, 3)
    run_good_column(o2, 3)
    assert o1.transcript == o2.transcript


def test_r1_one_sided():
    for s in range(300):
        neg = sample_hard_negative("g", 8, 8, seed=s)
        assert run_R1_g(_oracle(neg), AlgoConfig(seed=s)).output == 0
    assert run_R1_g(_oracle(make_grid("g", 8, 8)), AlgoConfig(seed=0)).output == 0


def test_r1_accept_rate_roughly_half():
    hits = 0
    trials = 2000
    for s in range(trials):
        x = generate_positive("g", 8, 8, seed=s // 10)
        hits += run_R1_g(_oracle(x), AlgoConfig(seed=s)).output
    sigma = (trials * 0.25) ** 0.5
    assert abs(hits - trials / 2) <= 4 * sigma


def test_r1_more_reps_accept_more():
    x = generate_positive("g", 8, 8, seed=1)
    one = sum(run_R1_g(_oracle(x), AlgoConfig(seed=s)).output for s in range(400))
    three = sum(run_R1_g(_oracle(x), AlgoConfig(seed=s, max_reps=3)).output for s in range(400))
    assert three > one


def test_ones_entry_identity():
    assert ONES == Entry(1, None, None, None)
