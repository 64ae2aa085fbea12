"""Min-plus valuations, tree propagation and non-membership certificates.

A valuation assigns rational weights to the ambient variables and sends a
Laurent polynomial to the minimum weighted degree over its support; that
map is additive on products and super-additive on sums, with equality on
sums of polynomials with positive coefficients.

On a rank-3 seed whose whole mutation class is cyclic, every exchange
relation is binomial in the other two cluster variables, so valuations
propagate along the 3-regular tree of mutation directions by an explicit
min-plus recursion.  A renormalized form of the same recursion (the delta
values below) has weights 1/2 + 1/2 on each edge after dividing by the
square roots of the exchange-weight products; those square roots are kept
exact as rational multiples of fixed square-free radicands.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .laurent import LaurentPoly
from .seeds import ExchangeMatrix, Seed, exchange_polynomial, matrix_mutate, skew_symmetrizer


class NotCyclicEverywhere(ValueError):
    """An acyclic matrix appeared where the cyclic recursion was assumed."""


class AcyclicSeedFound(ValueError):
    """The mutation walk left the cyclic regime (finite generation instead)."""


@dataclass(frozen=True)
class Valuation:
    """Rational weights, one per ambient variable (frozen weights usually 0)."""

    weights: tuple

    @staticmethod
    def on_cluster(seed: Seed, values: Sequence) -> "Valuation":
        if len(values) != seed.n:
            raise ValueError("one weight per cluster variable")
        w = [Fraction(x) for x in values] + [Fraction(0)] * (seed.m - seed.n)
        return Valuation(tuple(w))


def valuate(y: LaurentPoly, v: Valuation) -> Fraction:
    """min over the support of the weighted exponent sum; exact."""
    if y.is_zero():
        raise ValueError("the zero polynomial has no valuation")
    if len(v.weights) != y.ctx.nvars:
        raise ValueError("weight count does not match the context")
    return min(
        sum((Fraction(e_i) * w_i for e_i, w_i in zip(e, v.weights)), Fraction(0))
        for e in y.terms
    )


def _principal3(B: ExchangeMatrix) -> tuple:
    if B.n != 3:
        raise ValueError("rank-3 matrices only")
    return B.principal()


def _is_cyclic3(P: tuple) -> bool:
    """Each column carries exactly one positive and one negative entry."""
    for j in range(3):
        col = [P[i][j] for i in range(3) if i != j]
        if not (min(col) < 0 < max(col)):
            return False
    return True


def _others(j: int) -> tuple[int, int]:
    return tuple(i for i in range(3) if i != j)


@dataclass(frozen=True)
class TreeAssignment:
    """Values on the 3-regular tree, addressed by direction strings.

    Addresses use 1-based direction digits with no immediate repetition
    ("" is the root, "2" its neighbor across direction 2, and so on).
    ``edge_data`` holds per-edge extras keyed by the child address.
    """

    values: dict
    edge_data: dict

    def at(self, address: str) -> tuple:
        return self.values[address]

    def depth_values(self, depth: int) -> list:
        return [v for a, v in self.values.items() if len(a) == depth]

    def to_json(self) -> dict:
        return {
            a: [str(x) for x in triple] for a, triple in sorted(self.values.items())
        }


def _tree_walk(depth: int):
    """Yield (parent_address, direction) pairs in breadth-first order."""
    frontier = [""]
    for _ in range(depth):
        nxt = []
        for addr in frontier:
            last = int(addr[-1]) - 1 if addr else None
            for j in range(3):
                if j == last:
                    continue
                nxt.append((addr, j))
        yield from nxt
        frontier = [a + str(j + 1) for a, j in nxt]


def propagate_valuation(seed: Seed, v0: Valuation, depth: int) -> TreeAssignment:
    """Propagate cluster-variable valuations along the mutation tree.

    Requires a rank-3 seed whose matrix stays cyclic at every visited
    vertex; each step replaces the mutated variable's value by
    min(|b_ij| nu_i, |b_kj| nu_k) - nu_j.
    """
    P0 = _principal3(seed.matrix)
    if not _is_cyclic3(P0):
        raise NotCyclicEverywhere("the initial matrix is not cyclic")
    nu0 = tuple(v0.weights[:3])
    matrices = {"": ExchangeMatrix.make([list(r) for r in P0])}
    values = {"": nu0}
    for addr, j in _tree_walk(depth):
        child = addr + str(j + 1)
        if child in values:
            continue
        M = matrices[addr]
        P = M.principal()
        if not _is_cyclic3(P):
            raise NotCyclicEverywhere(f"acyclic matrix at address {addr!r}")
        i, k = _others(j)
        nu = values[addr]
        new_j = min(abs(P[i][j]) * nu[i], abs(P[k][j]) * nu[k]) - nu[j]
        triple = tuple(new_j if t == j else nu[t] for t in range(3))
        values[child] = triple
        matrices[child] = matrix_mutate(M, j)
    return TreeAssignment(values, {})


# -- the renormalized recursion -----------------------------------------------


def _squarefree(n: int) -> int:
    out = 1
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e % 2:
            out *= d
        d += 1
    return out * n


def _sqrt_ratio(num: int, den: int) -> Fraction:
    """sqrt(num/den) as an exact Fraction; raises if not a rational square."""
    fr = Fraction(num, den)
    a, b = isqrt(fr.numerator), isqrt(fr.denominator)
    if a * a != fr.numerator or b * b != fr.denominator:
        raise ArithmeticError(f"{num}/{den} is not a rational square")
    return Fraction(a, b)


@dataclass(frozen=True)
class DeltaWitness:
    """Finite-radius certificate produced by the renormalized recursion.

    ``sequence`` is the per-radius minimum of the raw delta values, which
    must be strictly decreasing; ``shifted`` subtracts the radius-r value,
    giving an assignment nonnegative inside radius r and negative at some
    vertex of radius r+1 (recorded in ``negative_at``).
    """

    assignment: TreeAssignment
    sequence: tuple
    shifted: dict
    radius: int
    strictly_decreasing: bool
    nonnegative_inside: bool
    negative_at: tuple | None

    @property
    def valid(self) -> bool:
        return (
            self.strictly_decreasing
            and self.nonnegative_inside
            and self.negative_at is not None
        )

    def to_json(self) -> dict:
        return {
            "radius": self.radius,
            "sequence": [str(x) for x in self.sequence],
            "strictly_decreasing": self.strictly_decreasing,
            "negative_at": list(self.negative_at) if self.negative_at else None,
            "shifted": {
                a: [str(x) for x in t] for a, t in sorted(self.shifted.items())
            },
        }


def delta_witness(
    B: ExchangeMatrix, radius: int, delta0: Sequence = (0, 0, 1)
) -> DeltaWitness:
    """Run the delta recursion to radius+1 and package the certificate.

    The edge weights u_j(t) = s_j(t) / (s_j(t) + s_j(t')) come from the
    square roots s_j = sqrt of the opposite exchange weight, carried
    exactly as rational multiples of fixed square-free radicands; the
    recursion s_j(t') = s_i(t) s_k(t) - s_j(t) is cross-checked against
    the mutated matrix at every step.
    """
    P0 = _principal3(B)
    if not _is_cyclic3(P0):
        raise AcyclicSeedFound("the initial matrix is not cyclic")
    d = skew_symmetrizer(B)
    if d is None:
        raise ValueError("delta recursion requires a skew-symmetrizable matrix")
    rad = []
    for j in range(3):
        i, k = _others(j)
        rad.append(_squarefree(d[i] * d[k]))

    def s_of(P, j) -> Fraction:
        i, k = _others(j)
        w = abs(P[i][k] * P[k][i])
        return _sqrt_ratio(w, rad[j])  # s_j = q * sqrt(rad_j)

    M0 = ExchangeMatrix.make([list(r) for r in P0])
    matrices = {"": M0}
    deltas = {"": tuple(Fraction(x) for x in delta0)}
    edge_data = {}
    for addr, j in _tree_walk(radius + 1):
        child = addr + str(j + 1)
        if child in deltas:
            continue
        M = matrices[addr]
        P = M.principal()
        if not _is_cyclic3(P):
            raise AcyclicSeedFound(f"acyclic matrix at address {addr!r}")
        i, k = _others(j)
        M2 = matrix_mutate(M, j)
        if not _is_cyclic3(M2.principal()):
            raise AcyclicSeedFound(f"acyclic matrix at address {child!r}")
        qj, qj2 = s_of(P, j), s_of(M2.principal(), j)
        # recursion check: s_i s_k = s_j + s_j', with sqrt(rad_i rad_k)
        # rewritten on the radicand of direction j
        cross = _sqrt_ratio(rad[i] * rad[k], rad[j])
        if s_of(P, i) * s_of(P, k) * cross != qj + qj2:
            raise AssertionError("square-root recursion mismatch")
        u_par = qj / (qj + qj2)
        u_child = qj2 / (qj + qj2)
        dl = deltas[addr]
        new_j = (min(dl[i], dl[k]) - u_par * dl[j]) / u_child
        deltas[child] = tuple(new_j if t == j else dl[t] for t in range(3))
        matrices[child] = M2
        edge_data[child] = {"direction": j + 1, "u_parent": u_par, "u_child": u_child}

    sequence = []
    for r in range(radius + 2):
        layer = [min(t) for a, t in deltas.items() if len(a) == r]
        sequence.append(min(layer))
    strict = all(a > b for a, b in zip(sequence, sequence[1:]))
    shift = sequence[radius]
    shifted = {a: tuple(x - shift for x in t) for a, t in deltas.items()}
    negative_at = None
    for a, t in sorted(shifted.items()):
        if len(a) == radius + 1:
            for idx, x in enumerate(t):
                if x < 0:
                    negative_at = (a, idx + 1)
                    break
        if negative_at:
            break
    ok_inside = all(
        x >= 0 for a, t in shifted.items() if len(a) <= radius for x in t
    )
    return DeltaWitness(
        assignment=TreeAssignment(deltas, edge_data),
        sequence=tuple(sequence),
        shifted=shifted,
        radius=radius,
        strictly_decreasing=strict,
        nonnegative_inside=ok_inside,
        negative_at=negative_at,
    )


# -- non-membership certificates -------------------------------------------------


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Grading certificate that an element avoids the lower bound.

    Valid when the valuation makes every exchange polynomial homogeneous,
    every generator strictly positive, and the element homogeneous,
    non-constant and of value strictly below every generator: then the
    lower bound's graded piece at that value contains only coefficients,
    which the element is not.  A negative value with nonnegative
    generators certifies on its own.
    """

    valid: bool
    reason: str
    value: Fraction | None
    generator_values: tuple
    valuation: Valuation

    def __bool__(self) -> bool:
        return self.valid

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "reason": self.reason,
            "value": None if self.value is None else str(self.value),
            "generator_values": [
                [str(a), str(b)] for a, b in self.generator_values
            ],
            "weights": [str(w) for w in self.valuation.weights],
        }


def _homogeneous_value(y: LaurentPoly, v: Valuation) -> Fraction | None:
    vals = {
        sum((Fraction(e_i) * w_i for e_i, w_i in zip(e, v.weights)), Fraction(0))
        for e in y.terms
    }
    return vals.pop() if len(vals) == 1 else None


def not_in_lower_bound_certificate(
    y: LaurentPoly, seed: Seed, v: Valuation
) -> LowerBoundCertificate:
    if y.is_zero():
        return LowerBoundCertificate(False, "zero element", None, (), v)
    if any(w != 0 for w in v.weights[seed.n :]):
        return LowerBoundCertificate(
            False, "frozen variables must have weight zero", None, (), v
        )
    n = seed.n
    gen_vals = []
    homogeneous = True
    for j in range(n):
        P = exchange_polynomial(seed, j)
        pv = _homogeneous_value(P, v)
        if pv is None:
            homogeneous = False
            pv = valuate(P, v)
        gen_vals.append((v.weights[j], pv - v.weights[j]))
    value = valuate(y, v)
    all_gens = [x for pair in gen_vals for x in pair]
    if value < 0 and all(g >= 0 for g in all_gens):
        return LowerBoundCertificate(
            True, "negative value with nonnegative generators", value,
            tuple(gen_vals), v,
        )
    nonconstant = any(any(e[:n]) for e in y.terms)
    y_hom = _homogeneous_value(y, v)
    g_min = min(all_gens)
    if (
        homogeneous
        and y_hom is not None
        and nonconstant
        and all(g > 0 for g in all_gens)
        and value < g_min
    ):
        return LowerBoundCertificate(
            True, "homogeneous of value below every generator", value,
            tuple(gen_vals), v,
        )
    if not nonconstant:
        reason = "element is constant over the coefficients"
    elif value >= g_min:
        reason = "value does not separate from the generators"
    elif not homogeneous or y_hom is None:
        reason = "grading argument needs homogeneity"
    else:
        reason = "generators not strictly positive"
    return LowerBoundCertificate(False, reason, value, tuple(gen_vals), v)
