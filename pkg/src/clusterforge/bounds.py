"""Lower and upper bound machinery: standard monomials and membership.

The lower bound of a seed is generated by the cluster variables together
with their exchange partners.  Monomials in those 2n symbols live in an
extended context (x block, primed block, frozen block); straightening
rewrites every product x_j * x'_j via the exchange polynomial until the
result is a combination of standard monomials, and termination follows
because each rewrite strictly lowers the primed degree.

Upper bound membership is decided through the two-cluster criterion: an
element is in the bound iff it is Laurent in the initial extended cluster
and, for every direction j, each coefficient of a negative power of x_j
is exactly divisible by the matching power of the exchange polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .graphs import acyclic_order, gamma, relabel_matrix
from .laurent import Context, LaurentPoly, NotDivisible, RatFunc
from .seeds import Seed, exchange_polynomial, initial_seed


class NotAcyclic(ValueError):
    """Standard-monomial leading exponents need an acyclic seed."""


# -- generator polynomials -----------------------------------------------------


def generator_context(seed: Seed) -> Context:
    """Context for polynomials in x_1..x_n, x'_1..x'_n and the frozen block."""
    n = seed.n
    names = (
        list(seed.ctx.names[:n])
        + [f"{seed.ctx.names[j]}'" for j in range(n)]
        + list(seed.ctx.names[n:])
    )
    return Context(tuple(names))


def _lift_to_generator_ctx(p: LaurentPoly, seed: Seed, gctx: Context) -> LaurentPoly:
    """Insert a zero primed block into an ambient-context polynomial."""
    n = seed.n
    terms = {}
    for e, c in p.terms.items():
        terms[e[:n] + (0,) * n + e[n:]] = c
    return LaurentPoly(gctx, terms)


def generator_value(p: LaurentPoly, seed: Seed) -> LaurentPoly:
    """Evaluate a generator polynomial in the seed's ambient field.

    Substitutes x'_j = P_j / x_j exactly; the result is Laurent in the
    initial extended cluster.
    """
    n, m = seed.n, seed.m
    ctx = seed.ctx
    P = [exchange_polynomial(seed, j) for j in range(n)]
    out = ctx.zero()
    for e, c in p.terms.items():
        xpart = e[:n]
        ypart = e[n : 2 * n]
        fpart = e[2 * n :]
        if any(x < 0 for x in xpart + ypart):
            raise ValueError("generator polynomials have nonnegative exponents")
        term = ctx.monomial(
            {
                **{i: xp for i, xp in enumerate(xpart)},
                **{n + i: fp for i, fp in enumerate(fpart)},
            },
            c,
        )
        for j, yp in enumerate(ypart):
            if yp:
                term = term * (P[j] ** yp) * ctx.monomial({j: -yp})
        out = out + term
    return out


def straighten(p: LaurentPoly, seed: Seed) -> LaurentPoly:
    """Rewrite away every x_j * x'_j product; the value is preserved.

    The output is a combination of standard monomials in the generator
    context.  Each rewrite multiplies by an exchange polynomial, which is
    prime-free of primed symbols, so the primed degree drops by one and
    the loop terminates.
    """
    n = seed.n
    gctx = p.ctx
    P = [
        _lift_to_generator_ctx(exchange_polynomial(seed, j), seed, gctx)
        for j in range(n)
    ]
    work = p
    while True:
        hit = None
        for e, c in work.terms.items():
            j = next(
                (j for j in range(n) if e[j] > 0 and e[n + j] > 0), None
            )
            if j is not None:
                hit = (e, c, j)
                break
        if hit is None:
            return work
        e, c, j = hit
        reduced = list(e)
        reduced[j] -= 1
        reduced[n + j] -= 1
        rest = LaurentPoly(gctx, {tuple(reduced): c})
        work = work - LaurentPoly(gctx, {e: c}) + rest * P[j]


def is_standard(p: LaurentPoly, n: int) -> bool:
    return all(
        not (e[j] > 0 and e[n + j] > 0) for e in p.terms for j in range(n)
    )


# -- standard monomials and leading exponents -----------------------------------


def standard_monomial_to_laurent(
    exponents: Sequence[int], seed: Seed
) -> LaurentPoly:
    """Exact Laurent expansion of x^<m>: positive entries use x_j, negative x'_j."""
    ctx = seed.ctx
    out = ctx.one()
    for j, mj in enumerate(exponents):
        if mj >= 0:
            out = out * ctx.monomial({j: mj})
        else:
            P = exchange_polynomial(seed, j)
            out = out * (P ** (-mj)) * ctx.monomial({j: mj})
    return out


def leading_exponent(exponents: Sequence[int], seed: Seed) -> tuple:
    """Lexicographically first support exponent of the expansion.

    Requires the seed's principal part to satisfy b_ij >= 0 for i > j,
    i.e. an acyclic seed already relabeled by acyclic_order.
    """
    P = seed.matrix.principal()
    n = seed.n
    if any(P[i][j] < 0 for i in range(n) for j in range(i)):
        raise NotAcyclic("relabel the seed with acyclic_order first")
    return standard_monomial_to_laurent(exponents, seed).leading_exponent()


def sorted_acyclic_seed(seed: Seed) -> Seed:
    """Relabel an acyclic seed so that b_ij >= 0 for i > j."""
    sigma = acyclic_order(seed.matrix)
    if sigma is None:
        raise NotAcyclic("seed has an oriented cycle")
    return initial_seed(relabel_matrix(seed.matrix, sigma))


def _box_exponents(n: int, box: int) -> Iterable[tuple]:
    return itertools.product(range(-box, box + 1), repeat=n)


def cycle_dependency(seed: Seed, cycle: Sequence[int]) -> dict:
    """The standard-monomial linear dependency forced by an oriented cycle.

    For a cycle j0 -> j1 -> ... -> j_{l-1} -> j0 of the sign graph, the
    product of the primed generators along the cycle equals a combination
    of standard monomials in which no term carries all l primes.  Returns
    {tuple of surviving primed coordinates: polynomial coefficient}, with
    the identity verified exactly before returning.
    """
    ctx = seed.ctx
    l = len(cycle)
    u = []
    v = []
    for j in cycle:
        col = seed.matrix.column(j)
        minus = {i: -b for i, b in enumerate(col) if b < 0}
        plus = {i: b for i, b in enumerate(col) if b > 0}
        u.append(ctx.monomial({**minus, j: minus.get(j, 0) - 1}))
        v.append(ctx.monomial({**plus, j: plus.get(j, 0) - 1}))
    lhs = ctx.one()
    for t in range(l):
        lhs = lhs * (u[t] + v[t])  # u_t + v_t = x'_{cycle[t]}
    pieces: dict[tuple, LaurentPoly] = {}
    rhs = ctx.zero()
    for bits in itertools.product((0, 1), repeat=l):
        J = [t for t in range(l) if bits[t]]
        if not J:
            continue
        Jplus = {(t + 1) % l for t in J}
        if any(t in Jplus for t in J):
            continue
        coeff = ctx.const((-1) ** (len(J) + 1))
        for t in J:
            coeff = coeff * u[t] * v[(t + 1) % l]
        if any(x < 0 for e in coeff.terms for x in e):
            raise AssertionError("cycle rewriting produced a non-regular monomial")
        outside = [t for t in range(l) if t not in J and t not in Jplus]
        rest = ctx.one()
        for t in outside:
            rest = rest * (u[t] + v[t])
        rhs = rhs + coeff * rest
        key = tuple(cycle[t] for t in outside)
        pieces[key] = pieces.get(key, ctx.zero()) + coeff
    prod_u = ctx.one()
    prod_v = ctx.one()
    for t in range(l):
        prod_u = prod_u * u[t]
        prod_v = prod_v * v[t]
    rhs = rhs + prod_u + prod_v
    pieces[()] = pieces.get((), ctx.zero()) + prod_u + prod_v
    if lhs != rhs:
        raise AssertionError("cycle identity failed to verify")
    return {"cycle": tuple(cycle), "pieces": pieces}


def _find_oriented_three_cycle(seed: Seed) -> tuple | None:
    g = gamma(seed.matrix)
    n = seed.n
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if len({i, j, k}) < 3:
                    continue
                if (i, j) in g.edges and (j, k) in g.edges and (k, i) in g.edges:
                    return (i, j, k)
    return None


def check_independence(seed: Seed, box: int) -> bool:
    """Linear independence of standard monomials with entries in [-box, box].

    For an acyclic seed this certifies independence of the finite family
    by pairwise-distinct leading exponents.  For a seed with an oriented
    3-cycle the cycle dependency is exhibited (and verified exactly), so
    the family is dependent and the answer is False.
    """
    sigma = acyclic_order(seed.matrix)
    if sigma is not None:
        sorted_seed = initial_seed(relabel_matrix(seed.matrix, sigma))
        seen = set()
        for exps in _box_exponents(seed.n, box):
            lead = leading_exponent(exps, sorted_seed)
            if lead in seen:
                return False
            seen.add(lead)
        return True
    cyc = _find_oriented_three_cycle(seed)
    if cyc is None:
        raise NotAcyclic("cyclic seed without an oriented 3-cycle in range")
    cycle_dependency(seed, cyc)  # raises if the dependency fails to verify
    return False


# -- the subset identity ---------------------------------------------------------


def diffcomb_check(size: int) -> bool:
    """Symbolic verification of the cyclic inclusion-exclusion identity.

    Over 2*size indeterminates u_i, v_i with the cyclic successor i -> i+1:
    the signed sum over subsets J with J and J+ disjoint of
    prod_{i not in J u J+} (u_i + v_i) * prod_{j in J} u_j v_{j+} equals
    prod u_i + prod v_i.
    """
    if size < 1:
        raise ValueError("size must be at least 1")
    names = [f"u{i}" for i in range(size)] + [f"v{i}" for i in range(size)]
    ctx = Context(tuple(names))
    u = [ctx.var(i) for i in range(size)]
    v = [ctx.var(size + i) for i in range(size)]
    total = ctx.zero()
    for bits in itertools.product((0, 1), repeat=size):
        J = [i for i in range(size) if bits[i]]
        Jplus = {(i + 1) % size for i in J}
        if any(i in Jplus for i in J):
            continue
        outside = [i for i in range(size) if i not in J and i not in Jplus]
        term = ctx.const((-1) ** len(J))
        for i in outside:
            term = term * (u[i] + v[i])
        for j in J:
            term = term * u[j] * v[(j + 1) % size]
        total = total + term
    expected = ctx.one()
    for i in range(size):
        expected = expected * u[i]
    rhs = ctx.one()
    for i in range(size):
        rhs = rhs * v[i]
    return total == expected + rhs


# -- upper bound membership -------------------------------------------------------


@dataclass(frozen=True)
class Membership:
    member: bool
    reason: str
    certificates: dict  # direction -> list of (power m, exact quotient)

    def __bool__(self) -> bool:
        return self.member

    def to_json(self) -> dict:
        return {
            "member": self.member,
            "reason": self.reason,
            "certificates": {
                str(j + 1): [
                    {"power": m, "quotient": q.to_json()} for m, q in certs
                ]
                for j, certs in self.certificates.items()
            },
        }


def upper_bound_member(y, seed: Seed) -> Membership:
    """Two-cluster membership test with per-direction divisibility certificates.

    Accepts a LaurentPoly or a RatFunc; a rational input is first reduced
    exactly, and failure of that reduction already refutes membership.
    For every direction j and every power m >= 1, the coefficient of
    x_j^(-m) must be divisible by P_j^m; each exact quotient is returned
    as a certificate.
    """
    if isinstance(y, RatFunc):
        try:
            y = y.reduce_to_laurent()
        except NotDivisible:
            return Membership(
                False, "not Laurent in the initial extended cluster", {}
            )
    certificates: dict[int, list] = {}
    for j in range(seed.n):
        P = exchange_polynomial(seed, j)
        certs = []
        for power, coeff in y.expand_in(j):
            if power >= 0:
                continue
            m = -power
            try:
                q = coeff.divide_exact(P ** m)
            except NotDivisible:
                return Membership(
                    False,
                    f"direction {j + 1}: coefficient of power {-m} not divisible",
                    certificates,
                )
            certs.append((m, q))
        certificates[j] = certs
    return Membership(True, "member of all adjacent Laurent rings", certificates)


def membership_from_adjacent(y: LaurentPoly, seed: Seed, k: int) -> Membership:
    """Membership tested from the k-mutated seed (same element, new cluster)."""
    from .seeds import rewrite_in_adjacent_cluster, seed_mutate

    try:
        moved = rewrite_in_adjacent_cluster(y, seed, k)
    except NotDivisible:
        return Membership(False, f"not Laurent in the {k + 1}-adjacent cluster", {})
    mutated = seed_mutate(seed, k)
    fresh = initial_seed(mutated.matrix)
    return upper_bound_member(moved, fresh)
