"""Big phase space: summed correlators, the triangular coordinate change,
and the generating potentials it identifies.

Coordinates x_{d,a} are dual to a descendant level d and a basis class a.
The standard potential collects stable-range descendant correlators, the
modified potential collects the pulled-back kind, and the two are related
by an invertible change of coordinates built from two-point descendant
series.  Every object here is exact and truncated by one shared policy.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Callable, Sequence

from .exact import (
    CurveClass,
    NovikovSeries,
    TruncationPolicy,
    antiderivative_q,
    beta_is_zero,
    format_rational,
)
from .engine import CorrelatorEngine, PrimaryTable
from .geometry import CohClass, GeometryModel

PhaseIndex = tuple[int, int]  # (descendant level, basis index)


def phase_indices(policy: TruncationPolicy, basis_rank: int) -> list[PhaseIndex]:
    return [(d, a) for d in range(policy.max_descendant + 1) for a in range(basis_rank)]


class SeriesClass:
    """Cohomology class whose coefficients are truncated exact series."""

    __slots__ = ("policy", "_parts")

    def __init__(self, policy: TruncationPolicy, parts: dict[CurveClass, CohClass] | None = None) -> None:
        self.policy = policy
        self._parts: dict[CurveClass, CohClass] = {}
        for beta, cls in (parts or {}).items():
            beta = tuple(beta)
            if policy.beta_degree(beta) > policy.max_beta_degree or cls.is_zero():
                continue
            self._parts[beta] = cls

    @classmethod
    def from_class(cls, policy: TruncationPolicy, value: CohClass) -> SeriesClass:
        return cls(policy, {policy.zero_beta(): value})

    def items(self) -> list[tuple[CurveClass, CohClass]]:
        return sorted(self._parts.items(), key=lambda kv: (self.policy.beta_degree(kv[0]), kv[0]))

    def coefficient(self, beta: CurveClass) -> CohClass | None:
        return self._parts.get(tuple(beta))

    def is_zero(self) -> bool:
        return not self._parts

    def __add__(self, other: SeriesClass) -> SeriesClass:
        merged = dict(self._parts)
        for beta, cls in other._parts.items():
            merged[beta] = merged[beta] + cls if beta in merged else cls
        return SeriesClass(self.policy, merged)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesClass):
            return NotImplemented
        return self.policy == other.policy and self._parts == other._parts


# ----------------------------------------------------------------------
# summation over effective classes


def summed_correlator(
    engine: CorrelatorEngine,
    pairs: Sequence[tuple[int, CohClass]],
    policy: TruncationPolicy,
) -> NovikovSeries:
    """Genus-zero descendant correlator summed over effective classes."""
    terms = {}
    for beta in policy.iter_effective():
        value = engine.descendant(0, beta, pairs)
        if value:
            terms[beta] = value
    return NovikovSeries(policy, terms)


def summed_generalized(
    engine: CorrelatorEngine,
    triples: Sequence[tuple[int, int, CohClass]],
    policy: TruncationPolicy,
) -> NovikovSeries:
    terms = {}
    for beta in policy.iter_effective():
        value = engine.generalized(beta, triples)
        if value:
            terms[beta] = value
    return NovikovSeries(policy, terms)


def summed_two_point(
    engine: CorrelatorEngine,
    d: int,
    x: CohClass,
    y: CohClass,
    policy: TruncationPolicy,
) -> NovikovSeries:
    """Two-point descendant series (the zero class never contributes)."""
    terms = {}
    for beta in policy.iter_effective():
        if beta_is_zero(beta):
            continue
        value = engine.two_point(d, x, y, beta)
        if value:
            terms[beta] = value
    return NovikovSeries(policy, terms)


# ----------------------------------------------------------------------
# primary three-point series and the small quantum product (table-only path)


def _primary3_multilinear(
    model: GeometryModel,
    table: PrimaryTable,
    beta: CurveClass,
    x: CohClass,
    y: CohClass,
    z: CohClass,
) -> Fraction:
    if beta_is_zero(beta):
        return model.integrate(model.cup(model.cup(x, y), z))
    total = Fraction(0)
    for ix in x.support():
        for iy in y.support():
            for iz in z.support():
                value = table.value(beta, ix, iy, iz)
                if value:
                    total += x.coeffs[ix] * y.coeffs[iy] * z.coeffs[iz] * value
    return total


def summed_primary3(
    model: GeometryModel,
    table: PrimaryTable,
    policy: TruncationPolicy,
    x: CohClass,
    y: CohClass,
    z: CohClass,
) -> NovikovSeries:
    terms = {}
    for beta in policy.iter_effective():
        value = _primary3_multilinear(model, table, beta, x, y, z)
        if value:
            terms[beta] = value
    return NovikovSeries(policy, terms)


def quantum_product(
    model: GeometryModel,
    table: PrimaryTable,
    policy: TruncationPolicy,
    x: CohClass,
    y: CohClass,
) -> SeriesClass:
    """Small quantum product: structure constants from three-point series.

    The zero-class part is the cup product; corrections are read off the
    primary table, so this path never touches the reduction engine.
    """
    duals = model.dual_bases()
    parts: dict[CurveClass, CohClass] = {}
    for beta in policy.iter_effective():
        acc = model.zero_class()
        hit = False
        for a in range(model.rank):
            value = _primary3_multilinear(model, table, beta, duals.delta_dual[a], x, y)
            if value:
                acc = acc + value * duals.delta[a]
                hit = True
        if hit and not acc.is_zero():
            parts[beta] = acc
    return SeriesClass(policy, parts)


def two_point_contraction(
    engine: CorrelatorEngine,
    d: int,
    gamma: CohClass,
    policy: TruncationPolicy,
) -> SeriesClass:
    """Operator trading one cotangent level for a dual-basis contraction.

    Level zero is the identity; for d >= 1 the output collects two-point
    descendant series against the basis, paired into the dual basis.
    """
    if d == 0:
        return SeriesClass.from_class(policy, gamma)
    model = engine.model
    duals = model.dual_bases()
    parts: dict[CurveClass, CohClass] = {}
    for beta in policy.iter_effective():
        if beta_is_zero(beta):
            continue
        acc = model.zero_class()
        hit = False
        for a in range(model.rank):
            value = engine.two_point(d - 1, gamma, duals.delta[a], beta)
            if value:
                acc = acc + value * duals.delta_dual[a]
                hit = True
        if hit and not acc.is_zero():
            parts[beta] = acc
    return SeriesClass(policy, parts)


def two_point_from_primaries(
    model: GeometryModel,
    table: PrimaryTable,
    policy: TruncationPolicy,
    d: int,
    x: CohClass,
    y: CohClass,
    gamma0: CohClass | None = None,
) -> NovikovSeries:
    """Two-point descendant series built from primary three-point data only.

    Alternating closed form: iterating the divisor relation trades the
    cotangent power for divisor cup powers on the descendant slot, leaving
    triple correlators that the product-compatibility identity converts
    into lower two-point series; each step ends with one formal
    antiderivative per division by the divisor pairing.  This is a second,
    engine-independent route to the same series.
    """
    gamma0 = gamma0 if gamma0 is not None else model.ample
    pairing = lambda beta: model.beta_pairing(gamma0, beta)  # noqa: E731
    total = NovikovSeries.zero(policy)
    product = None
    for j in range(1, d + 2):
        sign = Fraction((-1) ** (j + 1))
        shifted_x = model.cup(model.cup_power(gamma0, j - 1), x)
        if shifted_x.is_zero():
            continue
        if j <= d:
            if product is None:
                product = quantum_product(model, table, policy, gamma0, y)
            bracket = NovikovSeries.zero(policy)
            for beta_shift, cls in product.items():
                inner = two_point_from_primaries(model, table, policy, d - j, shifted_x, cls, gamma0)
                bracket = bracket + inner.shift(beta_shift)
        else:
            bracket = summed_primary3(model, table, policy, gamma0, shifted_x, y)
            zero_beta = policy.zero_beta()
            bracket = bracket - NovikovSeries.monomial(policy, zero_beta, bracket.constant_term())
        for _ in range(j):
            bracket = antiderivative_q(bracket, pairing)
        total = total + sign * bracket
    return total


# ----------------------------------------------------------------------
# the triangular coordinate change


class PhaseTransform:
    """Linear change of phase-space coordinates with series entries.

    Stored as an explicit matrix over the finite index window, with the
    identity on the diagonal; off-diagonal entries may only connect an
    output level c to input levels d >= c+1 (strict weight raising), which
    makes the inverse a terminating alternating sum.
    """

    def __init__(self, policy: TruncationPolicy, basis_rank: int, entries: dict[tuple[PhaseIndex, PhaseIndex], NovikovSeries]) -> None:
        self.policy = policy
        self.basis_rank = basis_rank
        self._entries = {key: s for key, s in entries.items() if not s.is_zero()}

    @classmethod
    def identity(cls, policy: TruncationPolicy, basis_rank: int) -> PhaseTransform:
        one = NovikovSeries.one(policy)
        entries = {(idx, idx): one for idx in phase_indices(policy, basis_rank)}
        return cls(policy, basis_rank, entries)

    def entry(self, out: PhaseIndex, inp: PhaseIndex) -> NovikovSeries:
        return self._entries.get((out, inp), NovikovSeries.zero(self.policy))

    def row(self, out: PhaseIndex) -> list[tuple[PhaseIndex, NovikovSeries]]:
        return sorted(
            ((inp, s) for (o, inp), s in self._entries.items() if o == out),
            key=lambda kv: kv[0],
        )

    def items(self) -> list[tuple[tuple[PhaseIndex, PhaseIndex], NovikovSeries]]:
        return sorted(self._entries.items())

    def is_identity(self) -> bool:
        return self == PhaseTransform.identity(self.policy, self.basis_rank)

    def strictly_raising(self) -> bool:
        """Off-diagonal entries must raise the descendant level."""
        for (out, inp), series in self._entries.items():
            if out == inp:
                if series != NovikovSeries.one(self.policy):
                    return False
            elif inp[0] < out[0] + 1:
                return False
        return True

    def compose(self, other: PhaseTransform) -> PhaseTransform:
        """Matrix product self . other (apply other first)."""
        by_out: dict[PhaseIndex, list[tuple[PhaseIndex, NovikovSeries]]] = {}
        for (out, mid), s in self._entries.items():
            by_out.setdefault(out, []).append((mid, s))
        other_rows: dict[PhaseIndex, list[tuple[PhaseIndex, NovikovSeries]]] = {}
        for (mid, inp), s in other._entries.items():
            other_rows.setdefault(mid, []).append((inp, s))
        entries: dict[tuple[PhaseIndex, PhaseIndex], NovikovSeries] = {}
        for out, mids in by_out.items():
            for mid, s1 in mids:
                for inp, s2 in other_rows.get(mid, ()):
                    prod = s1 * s2
                    if prod.is_zero():
                        continue
                    key = (out, inp)
                    entries[key] = entries[key] + prod if key in entries else prod
        return PhaseTransform(self.policy, self.basis_rank, entries)

    def _off_diagonal(self) -> PhaseTransform:
        return PhaseTransform(
            self.policy,
            self.basis_rank,
            {key: s for key, s in self._entries.items() if key[0] != key[1]},
        )

    def inverse(self) -> PhaseTransform:
        """Exact inverse at truncation via the alternating power sum."""
        nilpotent = self._off_diagonal()
        result = PhaseTransform.identity(self.policy, self.basis_rank)
        power = nilpotent
        sign = -1
        for _ in range(self.policy.max_descendant + 1):
            if not power._entries:
                break
            signed = PhaseTransform(
                self.policy,
                self.basis_rank,
                {key: sign * s for key, s in power._entries.items()},
            )
            result = result._plus(signed)
            power = nilpotent.compose(power)
            sign = -sign
        return result

    def _plus(self, other: PhaseTransform) -> PhaseTransform:
        entries = dict(self._entries)
        for key, s in other._entries.items():
            entries[key] = entries[key] + s if key in entries else s
        return PhaseTransform(self.policy, self.basis_rank, entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhaseTransform):
            return NotImplemented
        return (
            self.policy == other.policy
            and self.basis_rank == other.basis_rank
            and self._entries == other._entries
        )

    def to_records(self, model: GeometryModel) -> list[dict]:
        out = []
        for (o, i), series in self.items():
            for beta, value in series.items():
                out.append(
                    {
                        "out": [o[0], model.labels[o[1]]],
                        "in": [i[0], model.labels[i[1]]],
                        "beta": list(beta),
                        "value": format_rational(value),
                    }
                )
        return out


def build_transform(
    engine: CorrelatorEngine,
    policy: TruncationPolicy,
    two_point_series: Callable[[int, CohClass, CohClass], NovikovSeries] | None = None,
) -> PhaseTransform:
    """Assemble the coordinate change from two-point descendant series.

    The (c,b) output coordinate picks up, from each input x_{d,a} with
    d >= c+1, the two-point series of level d-c-1 pairing the a-th basis
    class against the b-th dual class.
    """
    model = engine.model
    duals = model.dual_bases()
    if two_point_series is None:
        two_point_series = lambda d, x, y: summed_two_point(engine, d, x, y, policy)  # noqa: E731
    entries: dict[tuple[PhaseIndex, PhaseIndex], NovikovSeries] = {}
    one = NovikovSeries.one(policy)
    for c, b in phase_indices(policy, model.rank):
        entries[((c, b), (c, b))] = one
        for d in range(c + 1, policy.max_descendant + 1):
            for a in range(model.rank):
                series = two_point_series(d - c - 1, duals.delta[a], duals.delta_dual[b])
                if not series.is_zero():
                    entries[((c, b), (d, a))] = series
    return PhaseTransform(policy, model.rank, entries)


# ----------------------------------------------------------------------
# potentials


class PotentialSeries:
    """Multiset-keyed polynomial with exact series coefficients.

    A key is a sorted tuple of (level, basis index) pairs; the stored value
    is the correlator divided by the product of multiplicity factorials, so
    two potentials agree exactly when their dicts agree.
    """

    def __init__(self, policy: TruncationPolicy, coeffs: dict[tuple[PhaseIndex, ...], NovikovSeries] | None = None) -> None:
        self.policy = policy
        self._coeffs = {key: s for key, s in (coeffs or {}).items() if not s.is_zero()}

    def coefficient(self, key: Sequence[PhaseIndex]) -> NovikovSeries:
        return self._coeffs.get(tuple(sorted(key)), NovikovSeries.zero(self.policy))

    def items(self) -> list[tuple[tuple[PhaseIndex, ...], NovikovSeries]]:
        return sorted(self._coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, PotentialSeries):
            return NotImplemented
        return self.policy == other.policy and self._coeffs == other._coeffs

    def difference(self, other: PotentialSeries) -> list[tuple[tuple[PhaseIndex, ...], NovikovSeries]]:
        """Nonzero coefficients of self - other, canonically ordered."""
        keys = set(self._coeffs) | set(other._coeffs)
        out = []
        for key in sorted(keys, key=lambda k: (len(k), k)):
            diff = self.coefficient(key) - other.coefficient(key)
            if not diff.is_zero():
                out.append((key, diff))
        return out

    def restricted_to_primary(self) -> PotentialSeries:
        return PotentialSeries(
            self.policy,
            {key: s for key, s in self._coeffs.items() if all(d == 0 for d, _ in key)},
        )

    def to_records(self, model: GeometryModel) -> list[dict]:
        out = []
        for key, series in self.items():
            for beta, value in series.items():
                out.append(
                    {
                        "indices": [[d, model.labels[a]] for d, a in key],
                        "beta": list(beta),
                        "value": format_rational(value),
                    }
                )
        return out


def _multiplicity_factor(key: tuple[PhaseIndex, ...]) -> int:
    factor = 1
    for count in Counter(key).values():
        factor *= factorial(count)
    return factor


def _assemble(policy: TruncationPolicy, basis_rank: int, correlator) -> PotentialSeries:
    coeffs: dict[tuple[PhaseIndex, ...], NovikovSeries] = {}
    indices = phase_indices(policy, basis_rank)
    for n in range(3, policy.max_x_degree + 1):
        for key in combinations_with_replacement(indices, n):
            series = correlator(key)
            if series.is_zero():
                continue
            coeffs[key] = series * Fraction(1, _multiplicity_factor(key))
    return PotentialSeries(policy, coeffs)


def potential_standard(engine: CorrelatorEngine, policy: TruncationPolicy) -> PotentialSeries:
    """Stable-range descendant potential at genus zero."""
    model = engine.model

    def correlator(key):
        pairs = [(d, model.basis_class(a)) for d, a in key]
        return summed_correlator(engine, pairs, policy)

    return _assemble(policy, model.rank, correlator)


def potential_modified(engine: CorrelatorEngine, policy: TruncationPolicy) -> PotentialSeries:
    """Same assembly with every cotangent power replaced by a pulled-back one."""
    model = engine.model

    def correlator(key):
        triples = [(0, d, model.basis_class(a)) for d, a in key]
        return summed_generalized(engine, triples, policy)

    return _assemble(policy, model.rank, correlator)


def potential_primary(engine: CorrelatorEngine, policy: TruncationPolicy) -> PotentialSeries:
    """Restriction of the standard potential to the level-zero coordinates."""
    model = engine.model
    coeffs: dict[tuple[PhaseIndex, ...], NovikovSeries] = {}
    zero_level = [(0, a) for a in range(model.rank)]
    for n in range(3, policy.max_x_degree + 1):
        for key in combinations_with_replacement(zero_level, n):
            pairs = [(0, model.basis_class(a)) for _, a in key]
            series = summed_correlator(engine, pairs, policy)
            if not series.is_zero():
                coeffs[key] = series * Fraction(1, _multiplicity_factor(key))
    return PotentialSeries(policy, coeffs)


def compose_with_transform(potential: PotentialSeries, transform: PhaseTransform) -> PotentialSeries:
    """Substitute the coordinate change into a potential, exactly."""
    policy = potential.policy
    rows = {idx: transform.row(idx) for idx in phase_indices(policy, transform.basis_rank)}
    out: dict[tuple[PhaseIndex, ...], NovikovSeries] = {}
    one = NovikovSeries.one(policy)
    for key, coeff in potential.items():
        expansions: dict[tuple[PhaseIndex, ...], NovikovSeries] = {(): one}
        for idx in key:
            new: dict[tuple[PhaseIndex, ...], NovikovSeries] = {}
            for xs, series in expansions.items():
                for inp, entry in rows[idx]:
                    prod = series * entry
                    if prod.is_zero():
                        continue
                    nk = tuple(sorted(xs + (inp,)))
                    new[nk] = new[nk] + prod if nk in new else prod
            expansions = new
        for xkey, mult in expansions.items():
            term = coeff * mult
            if term.is_zero():
                continue
            out[xkey] = out[xkey] + term if xkey in out else term
    return PotentialSeries(policy, out)


# ----------------------------------------------------------------------
# the potential identity and the per-correlator substitution identity


@dataclass
class TransformIdentityReport:
    ok: bool
    potential_mismatches: list = field(default_factory=list)
    substitution_mismatches: list = field(default_factory=list)
    checked_keys: int = 0
    substitution_checked: int = 0

    def __str__(self) -> str:
        lines = [
            f"potential identity: {'PASS' if not self.potential_mismatches else 'FAIL'} "
            f"({self.checked_keys} coefficients compared)",
            f"substitution identity: {'PASS' if not self.substitution_mismatches else 'FAIL'} "
            f"({self.substitution_checked} correlators compared)",
        ]
        for key, diff in self.potential_mismatches[:5]:
            lines.append(f"  mismatch at {key}: {diff}")
        for key, lhs, rhs in self.substitution_mismatches[:5]:
            lines.append(f"  substitution mismatch at {key}: {lhs} vs {rhs}")
        return "\n".join(lines)


def substitution_identity(
    engine: CorrelatorEngine,
    policy: TruncationPolicy,
    key: tuple[PhaseIndex, ...],
) -> tuple[NovikovSeries, NovikovSeries]:
    """Both sides of the slot-substitution identity for one correlator.

    The first slot carrying a positive level is rewritten as the sum over
    splits of its level through the contraction operator; the remaining
    slots stay conventional.
    """
    model = engine.model
    slot = next(p for p, (d, _) in enumerate(key) if d >= 1)
    d_slot, a_slot = key[slot]
    pairs = [(d, model.basis_class(a)) for d, a in key]
    lhs = summed_correlator(engine, pairs, policy)
    rhs = NovikovSeries.zero(policy)
    rest = [(d, 0, model.basis_class(a)) for p, (d, a) in enumerate(key) if p != slot]
    for j in range(d_slot + 1):
        operator = two_point_contraction(engine, d_slot - j, model.basis_class(a_slot), policy)
        for beta_shift, cls in operator.items():
            inner = summed_generalized(engine, [(0, j, cls)] + rest, policy)
            rhs = rhs + inner.shift(beta_shift)
    return lhs, rhs


def transform_identity_report(
    engine: CorrelatorEngine,
    policy: TruncationPolicy,
    substitution_keys: Sequence[tuple[PhaseIndex, ...]] | None = None,
) -> TransformIdentityReport:
    """Check that the standard potential equals the modified one composed
    with the coordinate change, and spot-check the substitution identity."""
    standard = potential_standard(engine, policy)
    modified = potential_modified(engine, policy)
    transform = build_transform(engine, policy)
    composed = compose_with_transform(modified, transform)
    mismatches = standard.difference(composed)
    checked = len({k for k, _ in standard.items()} | {k for k, _ in composed.items()})

    if substitution_keys is None:
        substitution_keys = [
            key for key, _ in standard.items() if any(d >= 1 for d, _ in key)
        ][:12]
    sub_mismatches = []
    for key in substitution_keys:
        lhs, rhs = substitution_identity(engine, policy, key)
        if lhs != rhs:
            sub_mismatches.append((key, lhs, rhs))

    return TransformIdentityReport(
        ok=not mismatches and not sub_mismatches,
        potential_mismatches=mismatches,
        substitution_mismatches=sub_mismatches,
        checked_keys=checked,
        substitution_checked=len(substitution_keys),
    )


def divisor_product_identity(
    engine: CorrelatorEngine,
    policy: TruncationPolicy,
    d: int,
    x: CohClass,
    y: CohClass,
) -> tuple[NovikovSeries, NovikovSeries]:
    """Both sides of the product-compatibility identity for summed series.

    Inserting the reduction divisor against a level-d slot equals lowering
    the level by one against the quantum product with the second argument.
    """
    if d < 1:
        raise ValueError("need a positive level on the descendant slot")
    model = engine.model
    gamma0 = engine.gamma0
    lhs_terms = {}
    for beta in policy.iter_effective():
        value = engine.three_point_descendant(beta, [(0, gamma0), (d, x), (0, y)])
        if value:
            lhs_terms[beta] = value
    lhs = NovikovSeries(policy, lhs_terms)
    product = quantum_product(model, engine.primary_table, policy, gamma0, y)
    rhs = NovikovSeries.zero(policy)
    for beta_shift, cls in product.items():
        inner = summed_two_point(engine, d - 1, x, cls, policy)
        rhs = rhs + inner.shift(beta_shift)
    return lhs, rhs
