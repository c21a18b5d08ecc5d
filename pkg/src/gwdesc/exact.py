"""Exact coefficient arithmetic: curve classes, truncation, Novikov-type series.

All coefficients in this package are `fractions.Fraction`; curve classes are
short integer vectors in the effective cone of a rank-m lattice; a series is
a finite map from curve classes to rationals, truncated by a weighted degree
(the pairing with a fixed ample divisor).  No floating point anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Iterable, Iterator, Mapping

Rational = Fraction
CurveClass = tuple[int, ...]


class PolicyMismatchError(ValueError):
    """Combining series that were built over different truncation policies."""


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" (or "p") into an exact rational."""
    return Fraction(str(text).strip())


def format_rational(value: Fraction) -> str:
    """Render an exact rational as "p/q", or "p" when the denominator is 1."""
    return str(value)


def beta_add(a: CurveClass, b: CurveClass) -> CurveClass:
    return tuple(x + y for x, y in zip(a, b))


def beta_is_zero(beta: CurveClass) -> bool:
    return not any(beta)


def beta_splittings(beta: CurveClass) -> Iterator[tuple[CurveClass, CurveClass]]:
    """All ordered decompositions beta = left + right with both effective."""
    for left in _cartesian(*(range(c + 1) for c in beta)):
        yield left, tuple(c - l for c, l in zip(beta, left))


@dataclass(frozen=True)
class TruncationPolicy:
    """Finite working window for all series-level computations.

    ``beta_weights`` records the degree of each lattice generator against the
    model's ample divisor; the degree of a curve class is the weighted
    coordinate sum, which is additive.  Series terms above
    ``max_beta_degree`` are dropped on construction and after every
    operation, so truncation commutes with the ring structure.
    """

    beta_weights: tuple[int, ...]
    max_beta_degree: int
    max_x_degree: int = 0
    max_descendant: int = 0

    def __post_init__(self) -> None:
        if any(w < 1 for w in self.beta_weights):
            raise ValueError("every lattice generator needs ample degree >= 1")
        if min(self.max_beta_degree, self.max_x_degree, self.max_descendant) < 0:
            raise ValueError("truncation bounds must be non-negative")

    @property
    def rank(self) -> int:
        return len(self.beta_weights)

    def zero_beta(self) -> CurveClass:
        return (0,) * self.rank

    def beta_degree(self, beta: CurveClass) -> int:
        if len(beta) != self.rank:
            raise ValueError(f"curve class {beta!r} has wrong rank (expected {self.rank})")
        return sum(w * b for w, b in zip(self.beta_weights, beta))

    def iter_effective(self) -> Iterator[CurveClass]:
        """All effective classes of degree <= max_beta_degree, degree order."""
        found = []
        ranges = (range(self.max_beta_degree // w + 1) for w in self.beta_weights)
        for beta in _cartesian(*ranges):
            d = self.beta_degree(beta)
            if d <= self.max_beta_degree:
                found.append((d, beta))
        found.sort()
        for _, beta in found:
            yield beta


class NovikovSeries:
    """Truncated exact series with one monomial q^beta per effective class.

    Instances are immutable by convention: every operation returns a new
    series, re-truncated against the shared policy.  Zero coefficients are
    never stored.
    """

    __slots__ = ("policy", "_terms")

    def __init__(
        self,
        policy: TruncationPolicy,
        terms: Mapping[CurveClass, Fraction] | Iterable[tuple[CurveClass, Fraction]] = (),
    ) -> None:
        self.policy = policy
        acc: dict[CurveClass, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for beta, coeff in items:
            beta = tuple(beta)
            if policy.beta_degree(beta) > policy.max_beta_degree:
                continue
            coeff = Fraction(coeff)
            if coeff:
                acc[beta] = acc.get(beta, Fraction(0)) + coeff
        self._terms = {b: c for b, c in acc.items() if c}

    @classmethod
    def zero(cls, policy: TruncationPolicy) -> NovikovSeries:
        return cls(policy)

    @classmethod
    def one(cls, policy: TruncationPolicy) -> NovikovSeries:
        return cls(policy, {policy.zero_beta(): Fraction(1)})

    @classmethod
    def monomial(cls, policy: TruncationPolicy, beta: CurveClass, coeff: Fraction | int = 1) -> NovikovSeries:
        return cls(policy, {tuple(beta): Fraction(coeff)})

    def coefficient(self, beta: CurveClass) -> Fraction:
        return self._terms.get(tuple(beta), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.coefficient(self.policy.zero_beta())

    def is_zero(self) -> bool:
        return not self._terms

    def items(self) -> list[tuple[CurveClass, Fraction]]:
        """Terms in canonical order: by degree, then lexicographically."""
        return sorted(self._terms.items(), key=lambda kv: (self.policy.beta_degree(kv[0]), kv[0]))

    def _check_policy(self, other: NovikovSeries) -> None:
        if self.policy != other.policy:
            raise PolicyMismatchError("series built over different truncation policies")

    def __add__(self, other: NovikovSeries) -> NovikovSeries:
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        self._check_policy(other)
        acc = dict(self._terms)
        for beta, coeff in other._terms.items():
            acc[beta] = acc.get(beta, Fraction(0)) + coeff
        return NovikovSeries(self.policy, acc)

    def __neg__(self) -> NovikovSeries:
        return NovikovSeries(self.policy, {b: -c for b, c in self._terms.items()})

    def __sub__(self, other: NovikovSeries) -> NovikovSeries:
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, NovikovSeries):
            self._check_policy(other)
            bound = self.policy.max_beta_degree
            deg = self.policy.beta_degree
            acc: dict[CurveClass, Fraction] = {}
            for b1, c1 in self._terms.items():
                d1 = deg(b1)
                for b2, c2 in other._terms.items():
                    if d1 + deg(b2) > bound:
                        continue
                    b = beta_add(b1, b2)
                    acc[b] = acc.get(b, Fraction(0)) + c1 * c2
            return NovikovSeries(self.policy, acc)
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            return NovikovSeries(self.policy, {b: c * q for b, c in self._terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def shift(self, beta: CurveClass) -> NovikovSeries:
        """Multiply by the monomial q^beta."""
        return self * NovikovSeries.monomial(self.policy, beta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NovikovSeries):
            return NotImplemented
        return self.policy == other.policy and self._terms == other._terms

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for beta, coeff in self.items():
            if beta_is_zero(beta):
                parts.append(format_rational(coeff))
            else:
                parts.append(f"{format_rational(coeff)}·q^{list(beta)}")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"NovikovSeries({self})"


def derivative_q(series: NovikovSeries, pairing) -> NovikovSeries:
    """Multiply the q^beta coefficient by pairing(beta)."""
    return NovikovSeries(series.policy, {b: c * pairing(b) for b, c in series._terms.items()})


def antiderivative_q(series: NovikovSeries, pairing) -> NovikovSeries:
    """Divide the q^beta coefficient by pairing(beta).

    The series must have no constant term, and pairing(beta) must be nonzero
    on every class present (true for any ample divisor pairing).
    """
    acc: dict[CurveClass, Fraction] = {}
    for beta, coeff in series._terms.items():
        if beta_is_zero(beta):
            raise ValueError("antiderivative needs a series with zero constant term")
        p = pairing(beta)
        if p == 0:
            raise ValueError(f"pairing vanishes on the nonzero class {beta!r}; divisor not ample here")
        acc[beta] = coeff / p
    return NovikovSeries(series.policy, acc)


def solve_linear(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """One exact solution of matrix·x = rhs, or None when inconsistent.

    Plain fraction Gauss elimination; fine for the tiny systems this package
    meets (Gram matrices, cup-product decompositions).
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, m) if aug[r][col] != 0), None)
        if pivot is None:
            continue
        aug[row], aug[pivot] = aug[pivot], aug[row]
        inv = aug[row][col]
        aug[row] = [v / inv for v in aug[row]]
        for r in range(m):
            if r != row and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[row])]
        pivots.append((row, col))
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if aug[r][n] != 0:
            return None
    solution = [Fraction(0)] * n
    for r, c in pivots:
        solution[c] = aug[r][n]
    return solution


def invert_matrix(matrix: list[list[Fraction]]) -> list[list[Fraction]] | None:
    """Exact inverse of a square matrix, or None when singular."""
    n = len(matrix)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]
