"""Exchange matrices and seeds of geometric type, with exact mutation.

An extended exchange matrix is an m x n integer matrix whose rows are
labeled by all ambient variables (the first n rows are the cluster part,
rows n..m-1 are frozen) and whose columns are the n mutable directions.
A seed carries such a matrix together with the Laurent expressions of its
cluster variables in the initial extended cluster; every mutation performs
the exchange-relation division exactly, so a failed division (which would
contradict Laurent behavior) raises NotDivisible instead of approximating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .laurent import Context, LaurentPoly, NotDivisible


class SignSkewSymmetryLost(ArithmeticError):
    """A mutation produced a principal part violating sign-skew-symmetry."""


@dataclass(frozen=True)
class ExchangeMatrix:
    """m x n integer matrix with cluster rows first; immutable."""

    entries: tuple[tuple[int, ...], ...]
    n: int
    labels: tuple[str, ...]

    @property
    def m(self) -> int:
        return len(self.entries)

    @staticmethod
    def make(rows: Sequence[Sequence[int]], labels: Sequence[str] | None = None
             ) -> "ExchangeMatrix":
        entries = tuple(tuple(int(x) for x in row) for row in rows)
        m = len(entries)
        n = len(entries[0]) if entries else 0
        if any(len(r) != n for r in entries):
            raise ValueError("ragged matrix")
        if n > m:
            raise ValueError("need at least as many rows as columns")
        if labels is None:
            labels = tuple(f"x{i + 1}" for i in range(m))
        return ExchangeMatrix(entries, n, tuple(labels))

    def principal(self) -> tuple[tuple[int, ...], ...]:
        return tuple(row[: self.n] for row in self.entries[: self.n])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "labels": list(self.labels),
            "btilde": [list(r) for r in self.entries],
        }

    @staticmethod
    def from_json(data) -> "ExchangeMatrix":
        rows = [[int(x) for x in row] for row in data["btilde"]]
        labels = data.get("labels")
        mat = ExchangeMatrix.make(rows, labels)
        if mat.n != data.get("n", mat.n) or mat.m != data.get("m", mat.m):
            raise ValueError("inconsistent n/m in seed JSON")
        return mat


def is_sign_skew_symmetric(B: ExchangeMatrix) -> bool:
    """Check b_ij = b_ji = 0 or b_ij*b_ji < 0 on the principal part."""
    P = B.principal()
    n = B.n
    for i in range(n):
        if P[i][i] != 0:
            return False
        for j in range(i + 1, n):
            a, b = P[i][j], P[j][i]
            if not ((a == 0 and b == 0) or a * b < 0):
                return False
    return True


def skew_symmetrizer(B: ExchangeMatrix) -> tuple[int, ...] | None:
    """Positive integer diagonal D with d_i b_ij = -d_j b_ji, or None.

    Ratios are propagated along a spanning forest of the nonzero pattern
    and every non-forest edge is verified.
    """
    if not is_sign_skew_symmetric(B):
        return None
    P = B.principal()
    n = B.n
    d: list[Fraction | None] = [None] * n
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if P[i][j] == 0:
                    continue
                ratio = Fraction(abs(P[i][j]), abs(P[j][i]))
                if d[j] is None:
                    d[j] = d[i] * ratio
                    stack.append(j)
                elif d[i] * P[i][j] != -d[j] * P[j][i]:
                    return None
    denom_lcm = 1
    for x in d:
        denom_lcm = denom_lcm * x.denominator // gcd(denom_lcm, x.denominator)
    ints = [int(x * denom_lcm) for x in d]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return tuple(v // g for v in ints)


def is_skew_symmetrizable(B: ExchangeMatrix) -> bool:
    return skew_symmetrizer(B) is not None


def matrix_mutate(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Matrix mutation in direction k (0-based), extended to all m rows.

    Raises SignSkewSymmetryLost if the mutated principal part violates
    sign-skew-symmetry; that reports a non-totally-mutable input rather
    than silently continuing.
    """
    if not 0 <= k < B.n:
        raise IndexError(f"direction {k} out of range")
    new_rows = []
    for i in range(B.m):
        row = []
        for j in range(B.n):
            if i == k or j == k:
                row.append(-B.entries[i][j])
            else:
                bik, bkj = B.entries[i][k], B.entries[k][j]
                row.append(B.entries[i][j] + (abs(bik) * bkj + bik * abs(bkj)) // 2)
        new_rows.append(tuple(row))
    out = ExchangeMatrix(tuple(new_rows), B.n, B.labels)
    if not is_sign_skew_symmetric(out):
        raise SignSkewSymmetryLost(f"mutation at direction {k}")
    return out


def rank(B: ExchangeMatrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination over Z."""
    a = [list(row) for row in B.entries]
    m, n = B.m, B.n
    r = 0
    prev = 1
    row_order = list(range(m))
    for col in range(n):
        piv = next((i for i in range(r, m) if a[row_order[i]][col] != 0), None)
        if piv is None:
            continue
        row_order[r], row_order[piv] = row_order[piv], row_order[r]
        pr = row_order[r]
        for i in range(r + 1, m):
            ri = row_order[i]
            for c in range(col + 1, n):
                a[ri][c] = (a[ri][c] * a[pr][col] - a[ri][col] * a[pr][c]) // prev
            a[ri][col] = 0
        prev = a[pr][col]
        r += 1
        if r == m:
            break
    return r


def _proportional_odd_ratio(ci: tuple[int, ...], cj: tuple[int, ...]) -> bool:
    """True iff cj = r*ci with |r| a ratio of two odd integers."""
    if all(x == 0 for x in ci) and all(x == 0 for x in cj):
        return True  # ratio 1
    t = next((t for t in range(len(ci)) if ci[t] != 0 or cj[t] != 0), None)
    if t is None or ci[t] == 0 or cj[t] == 0:
        return False
    r = Fraction(cj[t], ci[t])
    if any(Fraction(y) != r * x for x, y in zip(ci, cj)):
        return False
    return r.numerator % 2 != 0 and r.denominator % 2 != 0


def is_coprime(B: ExchangeMatrix) -> bool:
    """Pairwise coprimality of the exchange polynomials.

    Two columns spoil coprimality exactly when they are proportional with
    the proportionality coefficient an odd/odd rational.
    """
    cols = [B.column(j) for j in range(B.n)]
    for i in range(B.n):
        for j in range(i + 1, B.n):
            if _proportional_odd_ratio(cols[i], cols[j]):
                return False
    return True


# -- seeds -------------------------------------------------------------------


@dataclass(frozen=True)
class Seed:
    """A seed of geometric type with exact initial-cluster expressions.

    ``exprs`` holds the n current cluster variables as Laurent polynomials
    in the initial extended cluster; frozen variables are the generators
    themselves and never change.  ``general`` marks single-use seeds whose
    frozen block encodes formal coefficient symbols; those must not be
    mutated repeatedly, since the geometric-type coefficient rule would
    silently reinterpret the symbols.
    """

    matrix: ExchangeMatrix
    ctx: Context
    exprs: tuple[LaurentPoly, ...]
    history: tuple[int, ...] = ()
    general: bool = False

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def m(self) -> int:
        return self.matrix.m

    def all_exprs(self) -> list[LaurentPoly]:
        """Expressions of all m ambient variables (frozen ones are generators)."""
        return list(self.exprs) + [self.ctx.var(i) for i in range(self.n, self.m)]

    def cluster_key(self) -> frozenset:
        """Dedup identity: the unordered set of canonical cluster expressions."""
        return frozenset(e.key() for e in self.exprs)

    def to_json(self) -> dict:
        return self.matrix.to_json()


def initial_seed(B: ExchangeMatrix) -> Seed:
    if not is_sign_skew_symmetric(B):
        raise SignSkewSymmetryLost("initial matrix is not sign-skew-symmetric")
    ctx = Context(B.labels)
    exprs = tuple(ctx.var(j) for j in range(B.n))
    return Seed(B, ctx, exprs)


def general_seed(principal: Sequence[Sequence[int]]) -> Seed:
    """Seed over a principal matrix with formal coefficients p_j^+,p_j^-.

    The 2n coefficient symbols are realized as frozen rows (+1 and -1 in
    column j respectively), which reproduces the exchange polynomials
    P_j = p_j^+ prod x^(b+) + p_j^- prod x^(b-).  Intended for single-seed
    computations (bounds, straightening); repeated mutation is refused.
    """
    n = len(principal)
    rows = [list(map(int, row)) for row in principal]
    for j in range(n):
        rows.append([1 if i == j else 0 for i in range(n)])
    for j in range(n):
        rows.append([-1 if i == j else 0 for i in range(n)])
    labels = (
        [f"x{i + 1}" for i in range(n)]
        + [f"p{i + 1}+" for i in range(n)]
        + [f"p{i + 1}-" for i in range(n)]
    )
    B = ExchangeMatrix.make(rows, labels)
    seed = initial_seed(B)
    return Seed(seed.matrix, seed.ctx, seed.exprs, (), True)


def exchange_polynomial(seed: Seed, j: int) -> LaurentPoly:
    """P_j = prod_{b_ij>0} x_i^{b_ij} + prod_{b_ij<0} x_i^{-b_ij}.

    The product runs over all m rows, so frozen rows contribute the
    geometric-type coefficient monomials.  Expressed in the seed's own
    formal ambient variables, not composed with the current expressions.
    """
    col = seed.matrix.column(j)
    plus = {i: b for i, b in enumerate(col) if b > 0}
    minus = {i: -b for i, b in enumerate(col) if b < 0}
    return seed.ctx.monomial(plus) + seed.ctx.monomial(minus)


def adjacent_variable(seed: Seed, j: int) -> LaurentPoly:
    """The exchange partner x'_j of the seed, in initial-cluster coordinates."""
    value = exchange_polynomial(seed, j).compose(seed.all_exprs())
    return value.divide_exact(seed.exprs[j])


def seed_mutate(seed: Seed, k: int) -> Seed:
    """Seed mutation in direction k: exact exchange-relation division.

    NotDivisible propagates if the new cluster variable fails to be a
    Laurent polynomial in the initial extended cluster, which would mean
    the input was not totally mutable (or a bug upstream).
    """
    if seed.general and seed.history:
        raise ValueError("formal-coefficient seeds support single mutations only")
    new_expr = adjacent_variable(seed, k)
    new_matrix = matrix_mutate(seed.matrix, k)
    exprs = tuple(
        new_expr if j == k else seed.exprs[j] for j in range(seed.n)
    )
    return Seed(new_matrix, seed.ctx, exprs, seed.history + (k,), seed.general)


def rewrite_in_adjacent_cluster(y: LaurentPoly, seed: Seed, k: int) -> LaurentPoly:
    """Rewrite y (Laurent in seed's cluster) as Laurent in the k-mutated cluster.

    Substitutes x_k = P_k / x'_k; the variable slot k of the result means
    x'_k.  Negative x_k powers require the divisibility of their
    coefficients by the matching power of P_k, and NotDivisible signals
    that y does not lie in the adjacent Laurent ring.
    """
    P = exchange_polynomial(seed, k)
    out = y.ctx.zero()
    for power, coeff in y.expand_in(k):
        zk = y.ctx.monomial({k: -power})
        if power >= 0:
            out = out + coeff * (P ** power) * zk
        else:
            out = out + coeff.divide_exact(P ** (-power)) * zk
    return out
