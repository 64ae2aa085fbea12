import itertools
import random
from fractions import Fraction

import pytest

from clusterforge.coxeter import (
    WeylElement,
    cartan_data,
    fundamental_subset,
    longest_element,
    word_product,
)
from clusterforge.double_bruhat import (
    InvalidWord,
    MinorSpec,
    SamplingExhausted,
    build_btilde,
    build_gamma_tilde,
    btilde_direct,
    coxeter_cell_closed_forms,
    coxeter_cell_word,
    det,
    evaluate_minor,
    gamma_tilde_dot,
    indexed_word,
    minor_spec,
    nonvanishing_conditions,
    open_cell_a2_closed_forms,
    partial_products,
    sample_cell,
    sample_totally_positive,
    seed_from_btilde,
    tp_criterion_check,
    verify_cell_identities,
)
from clusterforge.graphs import explore_exchange_graph
from clusterforge.seeds import rank, skew_symmetrizer

from conftest import SL3_ROWS


A2 = cartan_data("A2")
A3 = cartan_data("A3")
OPEN_CELL_A2 = (1, 2, 1, -1, -2, -1)

GOLDEN_A2 = (
    (-1, 1, 0, 0),
    (1, 0, 0, 0),
    (0, -1, 1, 0),
    (1, 0, -1, 1),
    (-1, 1, 0, -1),
    (0, -1, 1, 0),
    (0, 1, 0, -1),
    (0, 0, 0, 1),
)


def all_reduced_words(cartan, w):
    """Every reduced word, by peeling right descents recursively."""
    if w.is_identity():
        return [()]
    out = []
    for i in range(cartan.rank):
        s = WeylElement.simple(cartan, i)
        shorter = w * s
        if shorter.length() == w.length() - 1:
            out.extend(word + (i + 1,) for word in all_reduced_words(cartan, shorter))
    return out


def double_words(neg_word, pos_word):
    n, p = len(neg_word), len(pos_word)
    for positions in itertools.combinations(range(n + p), n):
        word = []
        ni = pi = 0
        for t in range(n + p):
            if t in positions:
                word.append(-neg_word[ni])
                ni += 1
            else:
                word.append(pos_word[pi])
                pi += 1
        yield tuple(word)


def test_golden_matrix_both_constructions():
    iw = indexed_word(A2, OPEN_CELL_A2)
    assert build_btilde(iw, A2).rows == GOLDEN_A2
    assert btilde_direct(iw, A2).rows == GOLDEN_A2


def test_exchangeable_set_and_labels():
    iw = indexed_word(A2, OPEN_CELL_A2)
    assert iw.exchangeable() == [1, 2, 3, 4]
    bt = build_btilde(iw, A2)
    assert bt.row_labels == (-2, -1, 1, 2, 3, 4, 5, 6)


def test_gamma_tilde_spot_edges():
    iw = indexed_word(A2, OPEN_CELL_A2)
    g = build_gamma_tilde(iw, A2)
    edges = {(s, d) for s, d, _ in g.edges}
    assert (-1, 1) in edges  # horizontal, positive later letter
    assert (3, 2) in edges  # inclined edge of the middle square
    assert (4, 5) in edges  # inclined, negative later letter
    horizontal = {(s, d) for s, d, h in g.edges if h}
    assert (-1, 1) in horizontal and (3, 2) not in horizontal


def test_single_letter_word_has_no_exchangeable_indices():
    A1 = cartan_data("A1")
    iw = indexed_word(A1, (1,))
    assert iw.exchangeable() == []
    g = build_gamma_tilde(iw, A1)
    assert g.edges == ()  # no endpoint is exchangeable, so no edges at all
    bt = build_btilde(iw, A1)
    assert bt.col_labels == ()


def test_coxeter_pair_words():
    # (c, c): zero principal part
    word = coxeter_cell_word(A3)
    iw = indexed_word(A3, word)
    bt = build_btilde(iw, A3)
    seed = seed_from_btilde(bt)
    P = seed.matrix.principal()
    assert all(x == 0 for row in P for x in row)
    # (c, c^{-1}): b_ij = -a_ij above the diagonal, a_ij below
    r = A3.rank
    word = tuple([-(i + 1) for i in range(r)] + [r - i for i in range(r)])
    iw = indexed_word(A3, word)
    seed = seed_from_btilde(build_btilde(iw, A3))
    P = seed.matrix.principal()
    labels = [int(l[1:]) for l in seed.matrix.labels[: seed.n]]
    for a in range(r):
        for b in range(r):
            if a == b:
                continue
            i, j = labels[a], labels[b]
            expected = -A3.A[i - 1][j - 1] if i < j else A3.A[i - 1][j - 1]
            assert P[a][b] == expected


def test_invalid_word_rejected():
    with pytest.raises(InvalidWord):
        indexed_word(A2, (1, 1, -2))
    with pytest.raises(InvalidWord):
        indexed_word(A2, (3,))


def test_construction_crosscheck_exhaustive_a2():
    w0, _ = longest_element(A2)
    words = all_reduced_words(A2, w0)
    assert len(words) == 2
    count = 0
    for neg in words:
        for pos in words:
            for word in double_words(neg, pos):
                iw = indexed_word(A2, word)
                assert build_btilde(iw, A2).rows == btilde_direct(iw, A2).rows
                count += 1
    assert count == 80


def test_construction_crosscheck_random_a3():
    rng = random.Random(51)
    w0, _ = longest_element(A3)
    words = all_reduced_words(A3, w0)
    for _ in range(40):
        neg = rng.choice(words)
        pos = rng.choice(words)
        positions = sorted(rng.sample(range(12), 6))
        word = []
        ni = pi = 0
        for t in range(12):
            if ni < 6 and t == positions[ni]:
                word.append(-neg[ni])
                ni += 1
            else:
                word.append(pos[pi])
                pi += 1
        iw = indexed_word(A3, tuple(word))
        bt = build_btilde(iw, A3)
        assert bt.rows == btilde_direct(iw, A3).rows
        seed = seed_from_btilde(bt)
        assert rank(seed.matrix) == seed.n
        d = skew_symmetrizer(seed.matrix)
        assert d is not None


def test_symmetrizer_from_cartan_data():
    iw = indexed_word(A3, (1, -2, 2, 3, -1, 1, -3, 2))
    bt = build_btilde(iw, A3)
    # d_{|i_k|} |b_kl| = d_{|i_l|} |b_lk| on exchangeable pairs
    for k in bt.col_labels:
        for l in bt.col_labels:
            dk = A3.d[abs(iw.letter(k)) - 1]
            dl = A3.d[abs(iw.letter(l)) - 1]
            assert dk * abs(bt.entry(k, l)) == dl * abs(bt.entry(l, k))


def test_partial_products_running_word():
    iw = indexed_word(A2, OPEN_CELL_A2)
    u4, v4 = partial_products(iw, A2, 4)
    assert u4.matrix == WeylElement.simple(A2, 0).matrix
    assert v4.is_identity()
    um2, vm2 = partial_products(iw, A2, -2)
    assert um2.is_identity()
    w0, _ = longest_element(A2)
    assert vm2.matrix == w0.matrix


def test_minor_specs_running_word():
    iw = indexed_word(A2, OPEN_CELL_A2)
    expected = {
        -2: ({1, 2}, {2, 3}),
        -1: ({1}, {3}),
        1: ({1}, {2}),
        2: ({1, 2}, {1, 2}),
        3: ({1}, {1}),
        4: ({2}, {1}),
        5: ({2, 3}, {1, 2}),
        6: ({3}, {1}),
    }
    for k, (rows, cols) in expected.items():
        spec = minor_spec(iw, A2, k)
        assert (set(spec.rows), set(spec.cols)) == (rows, cols)


def test_evaluate_minor_identity_matrix():
    g = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    spec = MinorSpec(frozenset({1, 2}), frozenset({1, 2}))
    assert evaluate_minor(spec, g) == 1
    assert evaluate_minor(MinorSpec(frozenset({1}), frozenset({3})), g) == 0


def test_det_exact():
    g = [
        [Fraction(1), Fraction(2), Fraction(3)],
        [Fraction(0), Fraction(1), Fraction(4)],
        [Fraction(5), Fraction(6), Fraction(0)],
    ]
    assert det(g) == 1


def test_sample_cell_open_cell_conditions():
    rng = random.Random(61)
    w0, _ = longest_element(A2)
    g = sample_cell(A2, w0, w0, rng)
    assert det(g) == 1
    for spec in nonvanishing_conditions(A2, w0, w0):
        assert evaluate_minor(spec, g) != 0
    # the four open-cell conditions include x13 and x31
    assert g[0][2] != 0 and g[2][0] != 0


def test_sample_cell_identity_for_trivial_pair():
    e = WeylElement.identity(A2)
    ident = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    for spec in nonvanishing_conditions(A2, e, e):
        assert evaluate_minor(spec, ident) != 0


def test_degenerate_matrix_rejected_by_det():
    ones = [[Fraction(1)] * 3 for _ in range(3)]
    assert det(ones) == 0


def test_verify_open_cell_identities_small():
    rep = verify_cell_identities(
        A2, OPEN_CELL_A2, samples=10, rng_seed=3,
        closed_forms=open_cell_a2_closed_forms(),
    )
    assert rep.ok
    assert rep.closed_forms_checked == 40


def test_verify_coxeter_cell_identities_small():
    for cartan in (A2, A3):
        rep = verify_cell_identities(
            cartan,
            coxeter_cell_word(cartan),
            samples=10,
            rng_seed=9,
            closed_forms=coxeter_cell_closed_forms(cartan),
        )
        assert rep.ok


def test_verify_detects_wrong_closed_form():
    rep = verify_cell_identities(
        A2, OPEN_CELL_A2, samples=3, rng_seed=3,
        closed_forms={3: lambda g: g[0][0]},  # wrong on purpose
    )
    assert not rep.ok


def test_tp_samples_all_minors_positive():
    rng = random.Random(71)
    iw = indexed_word(A2, OPEN_CELL_A2)
    for _ in range(5):
        g = sample_totally_positive(A2, OPEN_CELL_A2, rng)
        assert det(g) > 0
        for k in iw.positions():
            assert evaluate_minor(minor_spec(iw, A2, k), g) > 0


def test_tp_criterion_check_report():
    rep = tp_criterion_check(A2, OPEN_CELL_A2, samples=5, clusters=4, rng_seed=5)
    assert rep.ok
    assert rep.clusters_checked == 4


def test_negative_entry_breaks_positivity():
    iw = indexed_word(A2, OPEN_CELL_A2)
    g = [
        [Fraction(1), Fraction(0), Fraction(-1)],
        [Fraction(0), Fraction(1), Fraction(0)],
        [Fraction(1), Fraction(0), Fraction(0)],
    ]
    assert det(g) == 1
    minors = [evaluate_minor(minor_spec(iw, A2, k), g) for k in iw.positions()]
    assert any(v <= 0 for v in minors)


def test_seed_from_btilde_matches_fixture():
    iw = indexed_word(A2, OPEN_CELL_A2)
    seed = seed_from_btilde(build_btilde(iw, A2))
    assert seed.matrix.entries == SL3_ROWS
    rep = explore_exchange_graph(seed, max_seeds=60)
    assert rep.clusters == 50 and rep.variables == 16


def test_gamma_tilde_dot_output():
    iw = indexed_word(A2, OPEN_CELL_A2)
    assert "->" in gamma_tilde_dot(build_gamma_tilde(iw, A2))


def test_thread_knob_does_not_change_output(monkeypatch):
    rep1 = verify_cell_identities(
        A2, OPEN_CELL_A2, samples=8, rng_seed=21,
        closed_forms=open_cell_a2_closed_forms(),
    )
    monkeypatch.setenv("CF_THREADS", "4")
    rep4 = verify_cell_identities(
        A2, OPEN_CELL_A2, samples=8, rng_seed=21,
        closed_forms=open_cell_a2_closed_forms(),
    )
    assert rep1 == rep4


def test_btilde_non_simply_laced_magnitudes():
    B2 = cartan_data("B2")
    # (c, c^{-1}) word: principal part has the negated Cartan entries above
    # the diagonal and the plain ones below
    word = (-1, -2, 2, 1)
    iw = indexed_word(B2, word)
    bt = build_btilde(iw, B2)
    assert bt.rows == btilde_direct(iw, B2).rows
    seed = seed_from_btilde(bt)
    P = seed.matrix.principal()
    assert abs(P[0][1] * P[1][0]) == abs(B2.A[0][1] * B2.A[1][0]) == 2
    G2 = cartan_data("G2")
    word = (-1, -2, 2, 1)
    iw = indexed_word(G2, word)
    bt = build_btilde(iw, G2)
    assert bt.rows == btilde_direct(iw, G2).rows
    P = seed_from_btilde(bt).matrix.principal()
    assert abs(P[0][1] * P[1][0]) == 3


def test_btilde_crosscheck_random_b3():
    rng = random.Random(81)
    B3 = cartan_data("B3")
    w0, _ = longest_element(B3)
    words = all_reduced_words(B3, w0)
    for _ in range(25):
        neg = rng.choice(words)
        pos = rng.choice(words)
        size = len(neg) + len(pos)
        positions = set(rng.sample(range(size), len(neg)))
        word = []
        ni = pi = 0
        for t in range(size):
            if t in positions:
                word.append(-neg[ni])
                ni += 1
            else:
                word.append(pos[pi])
                pi += 1
        iw = indexed_word(B3, tuple(word))
        bt = build_btilde(iw, B3)
        assert bt.rows == btilde_direct(iw, B3).rows
        seed = seed_from_btilde(bt)
        assert rank(seed.matrix) == seed.n
        assert skew_symmetrizer(seed.matrix) is not None


def test_minor_specs_refused_outside_type_a():
    B2 = cartan_data("B2")
    iw = indexed_word(B2, (-1, -2, 2, 1))
    with pytest.raises(Exception) as exc:
        minor_spec(iw, B2, 1)
    assert "type A" in str(exc.value)
