import random
from fractions import Fraction

import pytest

from clusterforge.laurent import NotDivisible
from clusterforge.seeds import (
    ExchangeMatrix,
    SignSkewSymmetryLost,
    adjacent_variable,
    exchange_polynomial,
    general_seed,
    initial_seed,
    is_coprime,
    is_sign_skew_symmetric,
    matrix_mutate,
    rank,
    rewrite_in_adjacent_cluster,
    seed_mutate,
    skew_symmetrizer,
)

from conftest import SL3_PRINCIPAL


B219 = ExchangeMatrix.make(SL3_PRINCIPAL)


def fraction_gauss_rank(rows):
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    m, n = len(a), len(a[0])
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(m):
            if i != r and a[i][col] != 0:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


def rand_symmetrizable(rng, n, frozen=0, dmax=2):
    """Random skew-symmetrizable principal part with optional frozen rows."""
    d = [rng.randint(1, dmax) for _ in range(n)]
    rows = [[0] * n for _ in range(n + frozen)]
    for i in range(n):
        for j in range(i + 1, n):
            s = rng.randint(-2, 2)
            if s == 0:
                continue
            # d_i * b_ij = -d_j * b_ji with integer entries
            from math import gcd

            g = gcd(d[i], d[j])
            rows[i][j] = s * (d[j] // g)
            rows[j][i] = -s * (d[i] // g)
    for i in range(n, n + frozen):
        for j in range(n):
            rows[i][j] = rng.randint(-2, 2)
    return ExchangeMatrix.make(rows)


def test_mutation_direction_two():
    out = matrix_mutate(B219, 1)
    assert out.entries == (
        (0, 1, 0, 0),
        (-1, 0, 1, -1),
        (0, -1, 0, 0),
        (0, 1, 0, 0),
    )


def test_mutation_involutive_random():
    rng = random.Random(2)
    for _ in range(25):
        B = rand_symmetrizable(rng, 4, frozen=2)
        for k in range(B.n):
            assert matrix_mutate(matrix_mutate(B, k), k).entries == B.entries


def test_mutation_preserves_rank(sl3_matrix):
    assert rank(sl3_matrix) == 4
    rng = random.Random(9)
    B = sl3_matrix
    for _ in range(50):
        B = matrix_mutate(B, rng.randrange(4))
        assert rank(B) == 4


def test_rank_against_fraction_gauss():
    rng = random.Random(13)
    for _ in range(40):
        rows = [
            [rng.randint(-4, 4) for _ in range(3)]
            for _ in range(rng.randint(3, 6))
        ]
        B = ExchangeMatrix.make(rows)
        assert rank(B) == fraction_gauss_rank(rows)


def test_rank_zero_matrix():
    assert rank(ExchangeMatrix.make([[0, 0], [0, 0]])) == 0


def test_sign_skew_symmetry_checks():
    assert is_sign_skew_symmetric(B219)
    bad = ExchangeMatrix.make([[0, 1], [1, 0]])
    assert not is_sign_skew_symmetric(bad)


def test_skew_symmetrizer_values():
    assert skew_symmetrizer(B219) == (1, 1, 1, 1)
    B = ExchangeMatrix.make([[0, 2], [-1, 0]])
    assert skew_symmetrizer(B) == (1, 2)
    assert skew_symmetrizer(ExchangeMatrix.make([[0, 1], [1, 0]])) is None


def test_symmetrized_mutation_stays_skew_symmetric():
    rng = random.Random(21)
    for _ in range(20):
        B = rand_symmetrizable(rng, 4)
        d = skew_symmetrizer(B)
        assert d is not None
        k = rng.randrange(4)
        Bm = matrix_mutate(B, k)
        P = Bm.principal()
        for i in range(4):
            for j in range(4):
                assert d[i] * P[i][j] == -d[j] * P[j][i]


def test_single_mutation_can_lose_sign_skew_symmetry():
    B = ExchangeMatrix.make([[0, 1, -1], [-1, 0, 1], [2, -1, 0]])
    assert is_sign_skew_symmetric(B)
    with pytest.raises(SignSkewSymmetryLost):
        matrix_mutate(B, 0)


def test_coprime_checks(sl3_matrix):
    assert is_coprime(sl3_matrix)
    # columns (0,0,1,2) and (0,0,3,6): ratio 3 is odd/odd
    cols = ExchangeMatrix.make([[0, 0], [0, 0], [1, 3], [2, 6]])
    assert not is_coprime(cols)
    doubled = ExchangeMatrix.make([[0, 0], [0, 0], [1, 2], [2, 4]])
    assert is_coprime(doubled)  # ratio 2 is not odd/odd


def test_exchange_polynomials_sl3(sl3_seed):
    ctx = sl3_seed.ctx
    x = {name: ctx.var(i) for i, name in enumerate(ctx.names)}
    assert exchange_polynomial(sl3_seed, 0) == x["x-1"] * x["x2"] + x["x-2"] * x["x3"]
    assert exchange_polynomial(sl3_seed, 1) == x["x-2"] * x["x3"] * x["x5"] + x["x1"] * x["x4"]
    assert exchange_polynomial(sl3_seed, 2) == x["x1"] * x["x4"] + x["x2"]
    assert exchange_polynomial(sl3_seed, 3) == x["x2"] * x["x6"] + x["x3"] * x["x5"]


def test_exchange_polynomial_zero_column():
    seed = initial_seed(ExchangeMatrix.make([[0, 0], [0, 0]]))
    assert exchange_polynomial(seed, 0) == seed.ctx.const(2)


def test_seed_mutation_first_direction(sl3_seed):
    ctx = sl3_seed.ctx
    s1 = seed_mutate(sl3_seed, 0)
    expected = (
        ctx.monomial({ctx.index("x-1"): 1, ctx.index("x2"): 1, 0: -1})
        + ctx.monomial({ctx.index("x-2"): 1, ctx.index("x3"): 1, 0: -1})
    )
    assert s1.exprs[0] == expected


def test_seed_mutation_involutive(sl3_seed):
    for k in range(4):
        back = seed_mutate(seed_mutate(sl3_seed, k), k)
        assert back.exprs == sl3_seed.exprs
        assert back.matrix.entries == sl3_seed.matrix.entries


def test_seed_mutations_stay_laurent(sl3_seed):
    rng = random.Random(4)
    s = sl3_seed
    for _ in range(25):
        s = seed_mutate(s, rng.randrange(4))  # NotDivisible would raise


def test_general_seed_exchange_polynomials(markov_seed):
    ctx = markov_seed.ctx
    p = exchange_polynomial(markov_seed, 0)
    expected = ctx.monomial({ctx.index("p1+"): 1, 2: 2}) + ctx.monomial(
        {ctx.index("p1-"): 1, 1: 2}
    )
    assert p == expected


def test_general_seed_refuses_repeated_mutation(markov_seed):
    once = seed_mutate(markov_seed, 0)
    with pytest.raises(ValueError):
        seed_mutate(once, 1)


def test_rewrite_in_adjacent_cluster_roundtrip(sl3_seed):
    ctx = sl3_seed.ctx
    # x1 = P_1 / x'_1 in the mutated cluster
    moved = rewrite_in_adjacent_cluster(ctx.var(0), sl3_seed, 0)
    P = exchange_polynomial(sl3_seed, 0)
    assert moved == P * ctx.monomial({0: -1})
    with pytest.raises(NotDivisible):
        rewrite_in_adjacent_cluster(ctx.monomial({0: -1}), sl3_seed, 0)


def test_adjacent_variable_matches_mutation(sl3_seed):
    for k in range(4):
        assert adjacent_variable(sl3_seed, k) == seed_mutate(sl3_seed, k).exprs[k]


def test_seed_json_roundtrip(sl3_matrix):
    again = ExchangeMatrix.from_json(sl3_matrix.to_json())
    assert again == sl3_matrix


def test_expand_exchange_polynomial_in_first_variable(sl3_seed):
    ctx = sl3_seed.ctx
    pairs = exchange_polynomial(sl3_seed, 1).expand_in(0)
    assert [p for p, _ in pairs] == [0, 1]
    i = ctx.index
    assert pairs[0][1] == ctx.monomial({i("x-2"): 1, 2: 1, i("x5"): 1})
    assert pairs[1][1] == ctx.var(3)


def test_leading_term_of_adjacent_variable(sl3_seed):
    ctx = sl3_seed.ctx
    y = adjacent_variable(sl3_seed, 0)  # (x-1 x2 + x-2 x3) / x1
    assert y.leading_term_in(0) == y  # every term carries x1^-1


def test_newton_polytope_of_binomial_parallel_to_column(sl3_matrix):
    from clusterforge.laurent import newton_polytope
    from clusterforge.seeds import initial_seed

    seed = initial_seed(sl3_matrix)
    for j in range(4):
        P = exchange_polynomial(seed, j)
        verts = sorted(newton_polytope(P).vertices)
        assert len(verts) == 2
        diff = [a - b for a, b in zip(verts[0], verts[1])]
        col = sl3_matrix.column(j)
        # the support segment is the column itself up to sign
        assert diff == list(col) or diff == [-x for x in col]


def test_matrix_json_accepts_decimal_strings():
    data = {"n": 2, "m": 3, "labels": ["x1", "x2", "f"],
            "btilde": [["0", "1"], ["-1", "0"], ["100000000000000000000", "0"]]}
    B = ExchangeMatrix.from_json(data)
    assert B.entries[2][0] == 10 ** 20


def test_matrix_json_rejects_inconsistent_shape():
    data = {"n": 3, "m": 2, "labels": ["a", "b"], "btilde": [[0, 1], [-1, 0]]}
    with pytest.raises(ValueError):
        ExchangeMatrix.from_json(data)
