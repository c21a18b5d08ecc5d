from __future__ import annotations

from fractions import Fraction

from gwdesc.exact import NovikovSeries
from gwdesc.phase import (
    PhaseTransform,
    SeriesClass,
    build_transform,
    compose_with_transform,
    divisor_product_identity,
    phase_indices,
    potential_modified,
    potential_primary,
    potential_standard,
    quantum_product,
    substitution_identity,
    summed_correlator,
    summed_two_point,
    transform_identity_report,
    two_point_contraction,
    two_point_from_primaries,
)


def cls(model, label):
    return model.class_from_map({label: 1})


def test_summed_correlators(p1_engine, p1, p2_engine, p2):
    m = p1.model
    policy = m.policy(3)
    h = cls(m, "h")
    assert summed_correlator(p1_engine, [(0, h)] * 3, policy) == NovikovSeries.monomial(policy, (1,))
    assert summed_correlator(p1_engine, [(0, m.unit)] * 3, policy).is_zero()
    m2 = p2.model
    policy2 = m2.policy(2)
    series = summed_correlator(p2_engine, [(0, cls(m2, "h2")), (0, cls(m2, "h2")), (0, cls(m2, "h"))], policy2)
    assert series == NovikovSeries.monomial(policy2, (1,))


def test_quantum_products(p1, p2):
    m = p1.model
    policy = m.policy(2)
    h = cls(m, "h")
    product = quantum_product(m, p1.primary, policy, h, h)
    assert product.items() == [((1,), m.unit)]
    with_unit = quantum_product(m, p1.primary, policy, m.unit, h)
    assert with_unit == SeriesClass.from_class(policy, h)

    m2 = p2.model
    policy2 = m2.policy(2)
    hh = quantum_product(m2, p2.primary, policy2, cls(m2, "h"), cls(m2, "h"))
    assert hh.items() == [((0,), cls(m2, "h2"))]
    hh2 = quantum_product(m2, p2.primary, policy2, cls(m2, "h"), cls(m2, "h2"))
    assert hh2.items() == [((1,), m2.unit)]


def _sc_times_class(model, table, policy, sc, y):
    out = SeriesClass(policy, {})
    for beta, part in sc.items():
        shifted = quantum_product(model, table, policy, part, y)
        pieces = {}
        for b2, c2 in shifted.items():
            from gwdesc.exact import beta_add

            pieces[beta_add(beta, b2)] = c2
        out = out + SeriesClass(policy, pieces)
    return out


def test_quantum_product_associative(p2):
    m = p2.model
    policy = m.policy(3)
    basis = [m.basis_class(i) for i in range(m.rank)]
    for x in basis:
        for y in basis:
            xy = quantum_product(m, p2.primary, policy, x, y)
            for z in basis:
                yz = quantum_product(m, p2.primary, policy, y, z)
                left = _sc_times_class(m, p2.primary, policy, xy, z)
                right = _sc_times_class(m, p2.primary, policy, yz, x)
                assert left == right, (x, y, z)


def test_two_point_contraction(p1_engine, p1):
    m = p1.model
    policy = m.policy(2)
    h = cls(m, "h")
    assert two_point_contraction(p1_engine, 0, h, policy) == SeriesClass.from_class(policy, h)
    u1 = two_point_contraction(p1_engine, 1, h, policy)
    assert u1.items() == [((1,), m.unit)]
    u2 = two_point_contraction(p1_engine, 2, h, policy)
    assert u2.items() == [((1,), h)]


def test_two_point_paths_agree(p1_engine, p1, p2_engine, p2):
    for engine, fx in ((p1_engine, p1), (p2_engine, p2)):
        m = fx.model
        policy = m.policy(3)
        basis = [m.basis_class(i) for i in range(m.rank)]
        for d in range(4):
            for x in basis:
                for y in basis:
                    assert summed_two_point(engine, d, x, y, policy) == two_point_from_primaries(
                        m, fx.primary, policy, d, x, y
                    )


def test_two_point_from_primaries_examples(p1, p1_engine):
    m = p1.model
    policy = m.policy(3)
    h = cls(m, "h")
    assert two_point_from_primaries(m, p1.primary, policy, 1, m.unit, h) == NovikovSeries(
        policy, {(1,): Fraction(-1)}
    )
    zero = two_point_from_primaries(m, p1.primary, policy, 0, m.zero_class(), h)
    assert zero.is_zero()


def test_build_transform_trivial_truncation(p1_engine, p1):
    m = p1.model
    policy = m.policy(0, max_descendant=2)
    transform = build_transform(p1_engine, policy)
    assert transform.is_identity()


def test_build_transform_entries(p1_engine, p1):
    m = p1.model
    policy = m.policy(1, max_descendant=2)
    transform = build_transform(p1_engine, policy)
    assert transform.strictly_raising()
    q = NovikovSeries.monomial(policy, (1,))
    # the (0, unit-row) picks up +q from x_{1,h} and -q from x_{2,unit}
    assert transform.entry((0, 0), (1, 1)) == q
    assert transform.entry((0, 0), (2, 0)) == -1 * q
    assert transform.entry((0, 0), (1, 0)).is_zero()
    assert transform.entry((1, 1), (2, 0)).is_zero()


def test_transform_inverse(p1_engine, p1):
    m = p1.model
    policy = m.policy(2, max_descendant=3)
    identity = PhaseTransform.identity(policy, m.rank)
    assert identity.inverse() == identity
    transform = build_transform(p1_engine, policy)
    assert transform.compose(transform.inverse()).is_identity()
    assert transform.inverse().compose(transform).is_identity()

    # nilpotent with a single entry inverts to its negative
    entries = {(idx, idx): NovikovSeries.one(policy) for idx in phase_indices(policy, m.rank)}
    entries[((0, 0), (3, 0))] = NovikovSeries.monomial(policy, (1,))
    single = PhaseTransform(policy, m.rank, entries)
    inv = single.inverse()
    assert inv.entry((0, 0), (3, 0)) == -1 * NovikovSeries.monomial(policy, (1,))
    assert single.compose(inv).is_identity()


def test_potentials_three_point_block_agrees(p1_engine, p1):
    m = p1.model
    policy = m.policy(2, max_x_degree=3, max_descendant=2)
    standard = potential_standard(p1_engine, policy)
    modified = potential_modified(p1_engine, policy)
    for key, series in standard.items():
        if len(key) == 3 and all(d == 0 for d, _ in key):
            assert modified.coefficient(key) == series
    # three-mark coefficients with powers differ between the two potentials
    probe = ((0, 1), (0, 1), (1, 1))
    assert standard.coefficient(probe) != modified.coefficient(probe) or standard.coefficient(probe).is_zero()


def test_primary_potential_is_restriction(p2_engine, p2):
    m = p2.model
    policy = m.policy(2, max_x_degree=3, max_descendant=1)
    standard = potential_standard(p2_engine, policy)
    primary = potential_primary(p2_engine, policy)
    assert primary == standard.restricted_to_primary()
    # classical cubic block: the pairing of two hyperplanes against the unit
    classical = primary.coefficient(((0, 0), (0, 1), (0, 1)))
    assert classical == Fraction(1, 2) * NovikovSeries.one(policy)
    # first quantum correction: one line through two of three point conditions
    quantum = primary.coefficient(((0, 1), (0, 2), (0, 2)))
    assert quantum == Fraction(1, 2) * NovikovSeries.monomial(policy, (1,))


def test_potential_coefficient_normalization(p1_engine, p1):
    m = p1.model
    policy = m.policy(1, max_x_degree=3, max_descendant=0)
    standard = potential_standard(p1_engine, policy)
    triple_h = standard.coefficient(((0, 1), (0, 1), (0, 1)))
    # repeated index: the correlator value divided by 3!
    assert triple_h == Fraction(1, 6) * NovikovSeries.monomial(policy, (1,))


def test_potential_keys_are_order_free(p1_engine, p1):
    m = p1.model
    policy = m.policy(2, max_x_degree=3, max_descendant=2)
    standard = potential_standard(p1_engine, policy)
    for key, series in standard.items():
        assert standard.coefficient(tuple(reversed(key))) == series


def test_compose_with_identity(p1_engine, p1):
    m = p1.model
    policy = m.policy(2, max_x_degree=3, max_descendant=2)
    modified = potential_modified(p1_engine, policy)
    assert compose_with_transform(modified, PhaseTransform.identity(policy, m.rank)) == modified


def test_transform_identity_small(p1_engine, p1):
    policy = p1.model.policy(2, max_x_degree=3, max_descendant=2)
    report = transform_identity_report(p1_engine, policy)
    assert report.ok, str(report)


def test_transform_identity_trivial_descendants(p2_engine, p2):
    policy = p2.model.policy(2, max_x_degree=3, max_descendant=0)
    report = transform_identity_report(p2_engine, policy)
    assert report.ok
    standard = potential_standard(p2_engine, policy)
    modified = potential_modified(p2_engine, policy)
    assert standard == modified  # no descendant slots: both potentials coincide


def test_substitution_identity_example(p1_engine, p1):
    m = p1.model
    policy = m.policy(2, max_x_degree=3, max_descendant=2)
    key = ((1, 1), (0, 1), (0, 0))  # level-one h against h and the unit
    lhs, rhs = substitution_identity(p1_engine, policy, key)
    assert lhs == rhs
    assert lhs == NovikovSeries.monomial(policy, (1,))


def test_divisor_product_identity(p1_engine, p1, p2_engine, p2):
    for engine, fx in ((p1_engine, p1), (p2_engine, p2)):
        m = fx.model
        policy = m.policy(3)
        basis = [m.basis_class(i) for i in range(m.rank)]
        for d in (1, 2):
            for x in basis:
                for y in basis:
                    lhs, rhs = divisor_product_identity(engine, policy, d, x, y)
                    assert lhs == rhs


def test_potential_records_are_canonical(p1_engine, p1):
    m = p1.model
    policy = m.policy(1, max_x_degree=3, max_descendant=1)
    potential = potential_standard(p1_engine, policy)
    records = potential.to_records(m)
    assert records == potential_standard(p1_engine, policy).to_records(m)
    keys = [(len(r["indices"]), [[d, m.label_index(a)] for d, a in r["indices"]]) for r in records]
    assert keys == sorted(keys)
    assert all(set(r) == {"indices", "beta", "value"} for r in records)
