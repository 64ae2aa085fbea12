"""Combinatorics and exact numerics of double Bruhat cells.

From a double reduced word this module builds the interaction graph and
the extended exchange matrix (two independent code paths), the partial
Weyl products and minor specifications, and verifies the induced cluster
structure numerically on random rational matrices of determinant one.
All evaluation is exact over Q.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .coxeter import (
    CartanData,
    SubsetFormOnlyTypeA,
    WeylElement,
    fundamental_subset,
    is_reduced,
    word_product,
)
from .seeds import ExchangeMatrix, Seed, initial_seed
from .util import parallel_map


class InvalidWord(ValueError):
    """The negative or positive subword is not reduced."""


class SamplingExhausted(RuntimeError):
    """Retry budget spent without meeting the nonvanishing conditions."""


@dataclass(frozen=True)
class IndexedWord:
    """A double reduced word with the prepended sentinel letters.

    Positions are -r..-1 (carrying letters -1..-r set to i_{-j} = -j) and
    1..N for the word itself.  ``k_plus`` maps each position to the next
    position carrying the same letter absolute value, with N+1 meaning
    "none"; positions with k and k_plus both inside [1, N] are the
    exchangeable ones and label matrix columns.
    """

    r: int
    word: tuple

    @property
    def N(self) -> int:
        return len(self.word)

    def positions(self) -> list[int]:
        return list(range(-self.r, 0)) + list(range(1, self.N + 1))

    def letter(self, k: int) -> int:
        return -(-k) if k < 0 else self.word[k - 1]

    def k_plus(self, k: int) -> int:
        a = abs(self.letter(k))
        for l in range(max(1, k + 1), self.N + 1):
            if abs(self.word[l - 1]) == a:
                return l
        return self.N + 1

    def exchangeable(self) -> list[int]:
        return [k for k in range(1, self.N + 1) if self.k_plus(k) <= self.N]


def indexed_word(cartan: CartanData, word: Sequence[int]) -> IndexedWord:
    """Validate the two subwords and attach position bookkeeping."""
    w = tuple(int(x) for x in word)
    if any(x == 0 or abs(x) > cartan.rank for x in w):
        raise InvalidWord("letters must lie in +-[1, r]")
    neg = [-x for x in w if x < 0]
    pos = [x for x in w if x > 0]
    if not is_reduced(neg, cartan):
        raise InvalidWord("negative subword is not reduced")
    if not is_reduced(pos, cartan):
        raise InvalidWord("positive subword is not reduced")
    return IndexedWord(cartan.rank, w)


# -- the interaction graph and matrix ------------------------------------------


@dataclass(frozen=True)
class GammaTilde:
    """Directed interaction graph; an edge remembers whether it is horizontal."""

    vertices: tuple
    edges: tuple  # (src, dst, horizontal: bool)


def build_gamma_tilde(iw: IndexedWord, cartan: CartanData) -> GammaTilde:
    """Edges by the three adjacency rules, directed by the sign of the later letter.

    A pair k < l is connected only if one of them is exchangeable; the edge
    is horizontal when l is the next occurrence of k's letter, inclined
    otherwise, and an inclined edge needs a negative Cartan entry between
    the two letters.
    """
    ex = set(iw.exchangeable())
    sgn = lambda x: 1 if x > 0 else -1
    edges = []
    positions = iw.positions()
    for a in range(len(positions)):
        for b in range(a + 1, len(positions)):
            k, l = positions[a], positions[b]
            if k not in ex and l not in ex:
                continue
            ik, il = iw.letter(k), iw.letter(l)
            kp, lp = iw.k_plus(k), iw.k_plus(l)
            horizontal = l == kp
            inclined = False
            if not horizontal and cartan.A[abs(ik) - 1][abs(il) - 1] < 0:
                if l < kp < lp:  # kp <= N since kp < lp <= N+1
                    inclined = sgn(il) == sgn(iw.letter(kp))
                elif l < lp < kp:  # lp <= N likewise
                    inclined = sgn(il) == -sgn(iw.letter(lp))
            if not horizontal and not inclined:
                continue
            if horizontal:
                src, dst = (k, l) if sgn(il) == 1 else (l, k)
            else:
                src, dst = (k, l) if sgn(il) == -1 else (l, k)
            edges.append((src, dst, horizontal))
    return GammaTilde(tuple(positions), tuple(sorted(edges)))


@dataclass(frozen=True)
class BtildeMatrix:
    """Extended exchange matrix in natural row order (-r..-1, 1..N)."""

    row_labels: tuple
    col_labels: tuple
    rows: tuple

    def entry(self, k: int, l: int) -> int:
        return self.rows[self.row_labels.index(k)][self.col_labels.index(l)]

    def to_json(self) -> dict:
        return {
            "rows": list(self.row_labels),
            "cols": list(self.col_labels),
            "btilde": [list(r) for r in self.rows],
        }


def build_btilde(iw: IndexedWord, cartan: CartanData) -> BtildeMatrix:
    """Matrix from the graph: signs from edge directions, sizes from Cartan entries."""
    g = build_gamma_tilde(iw, cartan)
    ex = iw.exchangeable()
    index = {k: i for i, k in enumerate(g.vertices)}
    entries = [[0] * len(ex) for _ in g.vertices]
    colpos = {l: j for j, l in enumerate(ex)}
    for src, dst, horizontal in g.edges:
        for k, l, sign in ((src, dst, 1), (dst, src, -1)):
            if l in colpos:
                mag = (
                    1
                    if horizontal
                    else -cartan.A[abs(iw.letter(k)) - 1][abs(iw.letter(l)) - 1]
                )
                entries[index[k]][colpos[l]] = sign * mag
    return BtildeMatrix(
        tuple(g.vertices), tuple(ex), tuple(tuple(r) for r in entries)
    )


def btilde_direct(iw: IndexedWord, cartan: CartanData) -> BtildeMatrix:
    """Independent closed-form construction of the same matrix.

    For row k and column l set p = max(k, l), q = min(k+, l+); the entry is
    a signed Cartan magnitude when p = q or when p < q with matching sign
    data, and zero otherwise.
    """
    ex = iw.exchangeable()
    sgn = lambda x: (x > 0) - (x < 0)
    rows = []
    for k in iw.positions():
        row = []
        for l in ex:
            if k == l:
                row.append(0)
                continue
            p = max(k, l)
            q = min(iw.k_plus(k), iw.k_plus(l))
            if p == q:
                row.append(-sgn(k - l) * sgn(iw.letter(p)))
            elif p < q <= iw.N and (
                sgn(iw.letter(p))
                * sgn(iw.letter(q))
                * sgn(k - l)
                * sgn(iw.k_plus(k) - iw.k_plus(l))
                > 0
            ):
                row.append(
                    -sgn(k - l)
                    * sgn(iw.letter(p))
                    * cartan.A[abs(iw.letter(k)) - 1][abs(iw.letter(l)) - 1]
                )
            else:
                row.append(0)
        rows.append(tuple(row))
    return BtildeMatrix(tuple(iw.positions()), tuple(ex), tuple(rows))


def seed_from_btilde(bt: BtildeMatrix) -> Seed:
    """Reorder rows cluster-first and wrap as a seed (labels keep positions)."""
    ex = list(bt.col_labels)
    frozen = [k for k in bt.row_labels if k not in set(ex)]
    order = ex + frozen
    rows = [bt.rows[bt.row_labels.index(k)] for k in order]
    labels = [f"x{k}" for k in order]
    return initial_seed(ExchangeMatrix.make(rows, labels))


def gamma_tilde_dot(g: GammaTilde) -> str:
    lines = ["digraph G {"]
    for v in g.vertices:
        lines.append(f'  "{v}";')
    for src, dst, horizontal in g.edges:
        style = "solid" if horizontal else "dashed"
        lines.append(f'  "{src}" -> "{dst}" [style={style}];')
    lines.append("}")
    return "\n".join(lines)


# -- partial products and minors -----------------------------------------------


def partial_products(
    iw: IndexedWord, cartan: CartanData, k: int
) -> tuple[WeylElement, WeylElement]:
    """The pair (u_{<=k}, v_{>k}); for sentinel positions (e, v^{-1})."""
    v_full = word_product(cartan, [x for x in iw.word if x > 0])
    if k < 0:
        return WeylElement.identity(cartan), v_full.inverse()
    u = WeylElement.identity(cartan)
    for l in range(1, k + 1):
        if iw.word[l - 1] < 0:
            u = u * WeylElement.simple(cartan, -iw.word[l - 1] - 1)
    v = WeylElement.identity(cartan)
    for l in range(iw.N, k, -1):
        if iw.word[l - 1] > 0:
            v = v * WeylElement.simple(cartan, iw.word[l - 1] - 1)
    return u, v


@dataclass(frozen=True)
class MinorSpec:
    """Row and column index sets of a type A generalized minor."""

    rows: frozenset
    cols: frozenset


def minor_spec(iw: IndexedWord, cartan: CartanData, k: int) -> MinorSpec:
    if cartan.family != "A":
        raise SubsetFormOnlyTypeA("minor row/column sets exist in type A only")
    u, v = partial_products(iw, cartan, k)
    i = abs(iw.letter(k))
    return MinorSpec(fundamental_subset(u, i), fundamental_subset(v, i))


def det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction Gaussian elimination."""
    n = len(rows)
    a = [list(map(Fraction, row)) for row in rows]
    sign = 1
    out = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        out *= a[col][col]
        for i in range(col + 1, n):
            if a[i][col] != 0:
                f = a[i][col] / a[col][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return out * sign


def evaluate_minor(spec: MinorSpec, g: Sequence[Sequence[Fraction]]) -> Fraction:
    rows = sorted(spec.rows)
    cols = sorted(spec.cols)
    return det([[g[i - 1][j - 1] for j in cols] for i in rows])


# -- sampling -------------------------------------------------------------------


def _unitriangular(rng: random.Random, size: int, lower: bool) -> list[list[Fraction]]:
    m = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for i in range(size):
        for j in range(size):
            if (i > j) if lower else (i < j):
                m[i][j] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return m


def _mat_mul(a, b):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)
    ]


def nonvanishing_conditions(
    cartan: CartanData, u: WeylElement, v: WeylElement
) -> list[MinorSpec]:
    """The 2r open-cell conditions: minors at (u w_i, w_i) and (w_i, v^{-1} w_i)."""
    specs = []
    vinv = v.inverse()
    e = WeylElement.identity(cartan)
    for i in range(1, cartan.rank + 1):
        specs.append(MinorSpec(fundamental_subset(u, i), fundamental_subset(e, i)))
        specs.append(MinorSpec(fundamental_subset(e, i), fundamental_subset(vinv, i)))
    return specs


def sample_cell(
    cartan: CartanData,
    u: WeylElement,
    v: WeylElement,
    rng: random.Random,
    extra_nonzero: Sequence[MinorSpec] = (),
    tries: int = 200,
) -> list[list[Fraction]]:
    """Random rational determinant-one matrix meeting the nonvanishing minors.

    Built as lower-unitriangular x diagonal(det 1) x upper-unitriangular
    with small random rational entries, resampled until every required
    minor is nonzero.
    """
    if cartan.family != "A":
        raise SubsetFormOnlyTypeA("cell sampling implemented for type A only")
    size = cartan.rank + 1
    conditions = list(nonvanishing_conditions(cartan, u, v)) + list(extra_nonzero)
    for _ in range(tries):
        lo = _unitriangular(rng, size, lower=True)
        up = _unitriangular(rng, size, lower=False)
        diag = [Fraction(rng.randint(1, 3), rng.randint(1, 3)) for _ in range(size - 1)]
        prod = Fraction(1)
        for x in diag:
            prod *= x
        diag.append(1 / prod)
        d = [
            [diag[i] if i == j else Fraction(0) for j in range(size)]
            for i in range(size)
        ]
        g = _mat_mul(_mat_mul(lo, d), up)
        assert det(g) == 1
        if all(evaluate_minor(s, g) != 0 for s in conditions):
            return g
    raise SamplingExhausted(f"no valid sample in {tries} tries")


def elementary(size: int, i: int, t: Fraction, upper: bool) -> list[list[Fraction]]:
    m = [[Fraction(int(a == b)) for b in range(size)] for a in range(size)]
    if upper:
        m[i - 1][i] = t
    else:
        m[i][i - 1] = t
    return m


def sample_totally_positive(
    cartan: CartanData, word: Sequence[int], rng: random.Random
) -> list[list[Fraction]]:
    """Totally positive determinant-one sample via positive elementary factors.

    Multiplies a positive determinant-one diagonal by the elementary Jacobi
    matrices of a double word for (w0, w0) with positive parameters.
    """
    if cartan.family != "A":
        raise SubsetFormOnlyTypeA("total positivity sampling is type A only")
    size = cartan.rank + 1
    diag = [Fraction(rng.randint(1, 3), rng.randint(1, 2)) for _ in range(size - 1)]
    prod = Fraction(1)
    for x in diag:
        prod *= x
    diag.append(1 / prod)
    g = [
        [diag[i] if i == j else Fraction(0) for j in range(size)] for i in range(size)
    ]
    for letter in word:
        t = Fraction(rng.randint(1, 4), rng.randint(1, 4))
        g = _mat_mul(g, elementary(size, abs(letter), t, upper=letter > 0))
    return g


# -- identity verification -------------------------------------------------------


@dataclass(frozen=True)
class CellCheckReport:
    samples: int
    relations_checked: int
    closed_forms_checked: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "relations_checked": self.relations_checked,
            "closed_forms_checked": self.closed_forms_checked,
            "failures": list(self.failures),
            "ok": self.ok,
        }


def verify_cell_identities(
    cartan: CartanData,
    word: Sequence[int],
    samples: int = 100,
    rng_seed: int = 1,
    closed_forms: dict | None = None,
) -> CellCheckReport:
    """Check the exchange structure on random cell samples, exactly.

    For every exchangeable position l the exchange polynomial is evaluated
    in the minors of the sample and divided by the minor at l; the quotient
    must reproduce the independently evaluated closed form whenever one is
    supplied (a callable g -> Fraction).  Every minor of the family is
    required nonzero, so the quotients are well defined.
    """
    iw = indexed_word(cartan, word)
    bt = build_btilde(iw, cartan)
    u = word_product(cartan, [-x for x in word if x < 0])
    v = word_product(cartan, [x for x in word if x > 0])
    specs = {k: minor_spec(iw, cartan, k) for k in iw.positions()}
    all_specs = list(specs.values())
    rng = random.Random(rng_seed)
    gs = [
        sample_cell(cartan, u, v, rng, extra_nonzero=all_specs)
        for _ in range(samples)
    ]
    closed_forms = closed_forms or {}

    def check(g) -> list[str]:
        local = []
        values = {k: evaluate_minor(specs[k], g) for k in iw.positions()}
        for l in bt.col_labels:
            plus = Fraction(1)
            minus = Fraction(1)
            for k in bt.row_labels:
                b = bt.entry(k, l)
                if b > 0:
                    plus *= values[k] ** b
                elif b < 0:
                    minus *= values[k] ** (-b)
            quotient = (plus + minus) / values[l]
            if l in closed_forms:
                expected = closed_forms[l](g)
                if quotient != expected:
                    local.append(f"position {l}: quotient != closed form")
        return local

    failures = []
    for i, result in enumerate(parallel_map(check, gs)):
        failures.extend(f"sample {i}: {msg}" for msg in result)
    return CellCheckReport(
        samples=samples,
        relations_checked=samples * len(bt.col_labels),
        closed_forms_checked=samples * len(closed_forms),
        failures=tuple(failures),
    )


def submatrix_minor(rows: Sequence[int], cols: Sequence[int]) -> Callable:
    def f(g):
        return det([[g[i - 1][j - 1] for j in sorted(cols)] for i in sorted(rows)])

    return f


def open_cell_a2_closed_forms() -> dict:
    """Exchange partners of the initial cluster for the A2 open cell word.

    Positions follow the word (1, 2, 1, -1, -2, -1).
    """
    return {
        1: submatrix_minor([1, 2], [1, 3]),
        2: lambda g: (
            g[0][1] * g[1][0] * g[2][2]
            - g[0][1] * g[1][2] * g[2][0]
            - g[0][2] * g[1][0] * g[2][1]
            + g[0][2] * g[1][1] * g[2][0]
        ),
        3: lambda g: g[1][1],
        4: submatrix_minor([1, 3], [1, 2]),
    }


def coxeter_cell_word(cartan: CartanData) -> tuple:
    """The double word (-1..-r, 1..r) for the pair (c, c)."""
    r = cartan.rank
    return tuple([-(i + 1) for i in range(r)] + [i + 1 for i in range(r)])


def coxeter_cell_closed_forms(cartan: CartanData) -> dict:
    """For the (c, c) cell the exchange partner at j is the principal minor."""
    return {
        j: submatrix_minor(range(1, j + 1), range(1, j + 1))
        for j in range(1, cartan.rank + 1)
    }


# -- total positivity -------------------------------------------------------------


@dataclass(frozen=True)
class PositivityReport:
    samples: int
    minors_checked: int
    clusters_checked: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "minors_checked": self.minors_checked,
            "clusters_checked": self.clusters_checked,
            "failures": list(self.failures),
            "ok": self.ok,
        }


def tp_criterion_check(
    cartan: CartanData,
    word: Sequence[int],
    samples: int = 50,
    clusters: int = 10,
    rng_seed: int = 1,
) -> PositivityReport:
    """Positivity of the minor family and of explored clusters on TP samples.

    Each totally positive sample must make every minor of the family
    positive; additionally, for ``clusters`` explored clusters, the cluster
    variables (as Laurent polynomials in the initial minors), the frozen
    minors and the determinant must all evaluate positively.
    """
    iw = indexed_word(cartan, word)
    bt = build_btilde(iw, cartan)
    seed = seed_from_btilde(bt)
    specs = {k: minor_spec(iw, cartan, k) for k in iw.positions()}
    order = list(bt.col_labels) + [
        k for k in bt.row_labels if k not in set(bt.col_labels)
    ]

    # collect cluster expression tuples from a truncated exploration
    from collections import deque

    from .seeds import seed_mutate

    found = [seed.exprs]
    seen = {seed.cluster_key()}
    queue = deque([seed])
    while queue and len(found) < clusters:
        s = queue.popleft()
        for k in range(s.n):
            s2 = seed_mutate(s, k)
            key = s2.cluster_key()
            if key not in seen:
                seen.add(key)
                found.append(s2.exprs)
                queue.append(s2)
                if len(found) >= clusters:
                    break

    rng = random.Random(rng_seed)
    gs = [sample_totally_positive(cartan, word, rng) for _ in range(samples)]
    frozen_idx = range(seed.n, seed.m)

    def check(g) -> list[str]:
        local = []
        values = [evaluate_minor(specs[k], g) for k in order]
        if any(v <= 0 for v in values):
            local.append("a family minor is not positive")
        if det(g) <= 0:
            local.append("determinant is not positive")
        for ci, exprs in enumerate(found):
            for e in exprs:
                if e.evaluate(values) <= 0:
                    local.append(f"cluster {ci}: variable not positive")
        for i in frozen_idx:
            if values[i] <= 0:
                local.append("frozen minor not positive")
        return local

    failures = []
    for i, result in enumerate(parallel_map(check, gs)):
        failures.extend(f"sample {i}: {msg}" for msg in result)
    return PositivityReport(
        samples=samples,
        minors_checked=samples * len(order),
        clusters_checked=len(found),
        failures=tuple(failures),
    )
