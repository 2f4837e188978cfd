"""Reference implementations used only by the tests.

They are written from the definitions directly and share no code with the
package, so agreement is evidence rather than tautology.
"""
import itertools
from fractions import Fraction

ONE = (1, None, None, None)


def canonical_paths(m):
    """Root-to-leaf direction strings built by the literal construction.

    Take the complete tree on 2**k leaves (largest power of two <= m) and give
    the m - 2**k leftmost leaves two children each.
    """
    k = m.bit_length() - 1
    base = ["".join(p) for p in itertools.product("LR", repeat=k)]  # left to right
    extra = m - 2 ** k
    out = []
    for idx, p in enumerate(base):
        if idx < extra:
            out += [p + "L", p + "R"]
        else:
            out.append(p)
    return out  # out[j-1] is T(j)


def _get(x, c):
    return x.rows[c[0] - 1][c[1] - 1]


def _walk(x, start, path):
    cell = start
    for d in path:
        e = _get(x, cell)
        cell = e.left if d == "L" else e.right
        if cell is None:
            return None
    return cell


def reference_evaluate(x):
    n, m = x.n, x.m
    cols = [[x.rows[i][j] for i in range(n)] for j in range(m)]
    marked = [j + 1 for j in range(m) if all(e.value == 1 for e in cols[j])]
    want = x.k if x.family == "h" else 1
    if len(marked) != want:
        return 0
    specials = []
    for b in marked:
        odd = [(i + 1, b) for i in range(n) if tuple(cols[b - 1][i]) != ONE]
        if len(odd) != 1:
            return 0
        specials.append(odd[0])
    a = specials[0]
    paths = canonical_paths(m)
    if x.family == "gpw":
        seen = []
        p = _get(x, a).left
        for _ in range(m - 1):
            if p is None or _get(x, p).value != 0:
                return 0
            seen.append(p[1])
            p = _get(x, p).left
        return int(sorted(seen) == [j for j in range(1, m + 1) if j != marked[0]])
    if x.family == "h":
        ea = _get(x, a)
        if any((_get(x, s).left, _get(x, s).right) != (ea.left, ea.right) for s in specials):
            return 0
        cyc = [a]
        while True:
            nxt = _get(x, cyc[-1]).aux
            if nxt is None:
                return 0
            if nxt == a:
                break
            if nxt in cyc or len(cyc) > x.k:
                return 0
            cyc.append(nxt)
        if sorted(cyc) != sorted(specials):
            return 0
    leaves = {}
    for j in range(1, m + 1):
        if j in marked:
            continue
        leaf = _walk(x, a, paths[j - 1])
        if leaf is None or leaf[1] != j or _get(x, leaf).value != 0:
            return 0
        leaves[j] = _get(x, leaf)
    if x.family == "f":
        return int(all(e.aux == marked[0] for e in leaves.values()))
    if x.family == "g":
        return int(sum(1 for e in leaves.values() if e.aux == a) == m // 2)
    return 1


def reference_good(x):
    """Good columns of a g input straight from the definition."""
    if not reference_evaluate(x):
        return set()
    n, m = x.n, x.m
    b = next(j for j in range(1, m + 1) if all(x.rows[i][j - 1].value == 1 for i in range(n)))
    a = next((i, b) for i in range(1, n + 1) if tuple(x.rows[i - 1][b - 1]) != ONE)
    paths = canonical_paths(m)
    return {j for j in range(1, m + 1) if j != b and _get(x, _walk(x, a, paths[j - 1])).aux == a}


def naive_depth(values, N, s):
    """Plain minimax on (function as dict over full inputs, fixed assignment)."""
    def rec(fixed):
        inputs = [z for z in itertools.product(range(s), repeat=N)
                  if all(z[i] == v for i, v in fixed.items())]
        outs = {values[z] for z in inputs}
        if len(outs) <= 1:
            return 0
        best = None
        for i in range(N):
            if i in fixed:
                continue
            d = 1 + max(rec({**fixed, i: v}) for v in range(s))
            best = d if best is None else min(best, d)
        return best
    return rec({})


def naive_degree(values, N):
    """Degree from the subset-sum Mobius formula, one coefficient at a time."""
    deg = 0
    for S in itertools.product((0, 1), repeat=N):
        ones = [i for i in range(N) if S[i]]
        coef = 0
        for r in range(len(ones) + 1):
            for T in itertools.combinations(ones, r):
                z = tuple(1 if i in T else 0 for i in range(N))
                coef += (-1) ** (len(ones) - len(T)) * values[z]
        if coef:
            deg = max(deg, len(ones))
    return deg


def complete_tree_expectation(k):
    """Mean subtree size over all 2**k - 1 nodes of a complete tree, summed by level.

    There are 2**(k-i) nodes whose subtree has 2**i - 1 nodes, i = 1..k.
    """
    total = 2 ** k - 1
    return sum(Fraction(2 ** (k - i), total) * (2 ** i - 1) for i in range(1, k + 1))
