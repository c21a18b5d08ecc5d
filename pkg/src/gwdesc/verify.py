"""Identity verification suites.

Each suite re-derives an exact identity along two independent evaluation
paths and reports literal equality, never tolerances.  Suites return
deterministic line-based reports so repeated runs are byte-identical.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from .engine import CorrelatorEngine, PrimaryTable
from .fixtures import plane_curve_counts
from .geometry import GeometryModel
from .moduli import constant_map_correlator, psi_integral_genus0
from .phase import (
    build_transform,
    divisor_product_identity,
    summed_two_point,
    transform_identity_report,
    two_point_from_primaries,
)


@dataclass
class SuiteResult:
    name: str
    ok: bool
    lines: list[str] = field(default_factory=list)

    def render(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        body = "\n".join(f"  {line}" for line in self.lines)
        head = f"[{status}] suite {self.name}"
        return f"{head}\n{body}" if body else head


def _engine(model: GeometryModel, primary: PrimaryTable, **kwargs) -> CorrelatorEngine:
    return CorrelatorEngine(model, primary, **kwargs)


# ----------------------------------------------------------------------


def suite_point_oracle(model: GeometryModel, primary: PrimaryTable, nmax: int = 7) -> SuiteResult:
    """Boundary-splitting recursion against the closed multinomial form.

    The machinery under test is model-independent; when handed a
    positive-dimensional model the suite runs on the built-in
    zero-dimensional fixture instead and says so.
    """
    lines: list[str] = []
    if model.dimension != 0:
        from .fixtures import load_fixture

        fixture = load_fixture("point")
        model, primary = fixture.model, fixture.primary
        lines.append("ran on the zero-dimensional fixture")
    engine = _engine(model, primary)
    one = model.unit
    checked = 0
    failures: list[str] = []
    for n in range(3, nmax + 1):
        for exps in combinations_with_replacement(range(n), n):
            if sum(exps) > n - 1:
                continue  # keep a margin of off-dimension cases
            checked += 1
            got = engine.modified(model_beta_zero(model), [(e, one) for e in exps])
            want = psi_integral_genus0(list(exps))
            if got != want:
                failures.append(f"exponents {exps}: got {got}, expected {want}")
    lines = [f"checked {checked} exponent multisets up to n={nmax}"] + lines + failures
    return SuiteResult("point-oracle", not failures, lines)


def model_beta_zero(model: GeometryModel):
    return (0,) * model.lattice_rank


def suite_transform(
    model: GeometryModel,
    primary: PrimaryTable,
    qmax: int = 3,
    xdeg: int = 4,
    dmax: int = 3,
) -> SuiteResult:
    """Standard potential against the composed modified potential."""
    engine = _engine(model, primary)
    policy = model.policy(qmax, max_x_degree=xdeg, max_descendant=dmax)
    report = transform_identity_report(engine, policy)
    transform = build_transform(engine, policy)
    triangular = transform.strictly_raising()
    inverse_ok = transform.compose(transform.inverse()).is_identity()
    lines = [
        f"coefficients compared: {report.checked_keys}",
        f"substitution identities compared: {report.substitution_checked}",
        f"triangular shape: {'ok' if triangular else 'violated'}",
        f"inverse composes to identity: {'ok' if inverse_ok else 'violated'}",
    ]
    for key, diff in report.potential_mismatches[:5]:
        lines.append(f"potential mismatch at {key}: {diff}")
    for key, lhs, rhs in report.substitution_mismatches[:5]:
        lines.append(f"substitution mismatch at {key}: {lhs} vs {rhs}")
    ok = report.ok and triangular and inverse_ok
    return SuiteResult("transform", ok, lines)


def suite_enumerative(model: GeometryModel, primary: PrimaryTable, dmax: int = 4) -> SuiteResult:
    """Engine-summed plane counts against the associativity oracle.

    Runs on the given model when it is plane-shaped (so user-supplied plane
    tables are screened too); otherwise falls back to the built-in plane
    fixture.
    """
    lines: list[str] = []
    plane_shaped = (
        model.dimension == 2
        and model.lattice_rank == 1
        and any(d == 2 for d in model.degrees)
    )
    if not plane_shaped:
        from .fixtures import load_fixture

        fixture = load_fixture("P2")
        model, primary = fixture.model, fixture.primary
        lines.append("ran on the built-in plane fixture")
    engine = _engine(model, primary)
    oracle = plane_curve_counts(dmax)
    point = next(model.basis_class(i) for i, d in enumerate(model.degrees) if d == 2)
    failures = []
    for d in range(1, dmax + 1):
        got = engine.primary((d,), [point] * (3 * d - 1))
        want = oracle[d]
        lines.append(f"degree {d}: engine {got}, oracle {want}")
        if got != want:
            failures.append(d)
    return SuiteResult("enumerative", not failures, lines)


def suite_divisor_independence(
    model: GeometryModel, primary: PrimaryTable, qmax: int = 3, dmax: int = 3
) -> SuiteResult:
    """Reductions with the ample divisor against a rescaled one."""
    base = _engine(model, primary)
    scaled = _engine(model, primary, gamma0=3 * model.ample)
    policy = model.policy(qmax)
    failures = []
    checked = 0
    basis = [model.basis_class(i) for i in range(model.rank)]
    for beta in policy.iter_effective():
        if not any(beta):
            continue
        for d1 in range(dmax + 1):
            for d2 in range(dmax + 1):
                for x in basis:
                    for y in basis:
                        checked += 1
                        v1 = base.two_point_general(d1, x, d2, y, beta)
                        v2 = scaled.two_point_general(d1, x, d2, y, beta)
                        if v1 != v2:
                            failures.append(f"two-point {beta} {d1} {d2}: {v1} vs {v2}")
        for d in range(dmax + 1):
            for x in basis:
                checked += 1
                if base.one_point(d, x, beta) != scaled.one_point(d, x, beta):
                    failures.append(f"one-point {beta} {d}")
        checked += 1
        if base.zero_point(beta) != scaled.zero_point(beta):
            failures.append(f"zero-point {beta}")
    # the primary-only route must not depend on the divisor choice either
    for d in range(dmax + 1):
        for x in basis:
            for y in basis:
                checked += 1
                with_ample = two_point_from_primaries(model, primary, policy, d, x, y)
                with_scaled = two_point_from_primaries(
                    model, primary, policy, d, x, y, gamma0=3 * model.ample
                )
                if with_ample != with_scaled:
                    failures.append(f"primary-route series d={d}: divisor choice leaked")
    lines = [f"checked {checked} reductions with both divisors"] + failures[:10]
    return SuiteResult("divisor-independence", not failures, lines)


# ----------------------------------------------------------------------
# randomized identity battery


def _random_query(rng: random.Random, model: GeometryModel, qmax: int, force_valid: bool):
    """A random small genus-0 stable query; optionally dimension-valid."""
    for _ in range(200):
        n = rng.randint(3, 5)
        beta = tuple(
            rng.randint(0, max(0, qmax // w))
            for w in (model.ample_weights() if model.lattice_rank else ())
        )
        pairs = []
        for _ in range(n):
            d = rng.choice((0, 0, 0, 1, 1, 2))
            a = rng.randrange(model.rank)
            pairs.append((d, a))
        if force_valid:
            need = model.dimension + model.c1_pairing(beta) + n - 3
            have = sum(d + model.degrees[a] for d, a in pairs)
            if have != need:
                continue
        return beta, pairs
    return None


def suite_identities(
    model: GeometryModel,
    primary: PrimaryTable,
    count: int = 200,
    seed: int = 20240801,
    qmax: int = 3,
) -> SuiteResult:
    """Randomized identity battery, each identity along two paths.

    Per query: the divisor relation, the dilaton relation, permutation
    invariance, dimension vanishing against the unchecked recursion, the
    reduction-slot independence of the descendant relation, the three-point
    contraction route against the general recursion, and the summed
    product-compatibility identity.
    """
    engine = _engine(model, primary)
    unchecked = _engine(model, primary, check_dimension=False)
    policy = model.policy(qmax)
    rng = random.Random(seed)
    counters = {
        "divisor": 0,
        "dilaton": 0,
        "permutation": 0,
        "dimension-vanishing": 0,
        "slot-independence": 0,
        "three-point-agreement": 0,
        "product-compatibility": 0,
    }
    failures: list[str] = []
    basis = [model.basis_class(i) for i in range(model.rank)]

    for case in range(count):
        force_valid = case % 2 == 0
        query = _random_query(rng, model, qmax, force_valid)
        if query is None:
            continue
        beta, raw = query
        pairs = [(d, basis[a]) for d, a in raw]

        lhs, rhs = engine.check_divisor_relation(beta, pairs)
        counters["divisor"] += 1
        if lhs != rhs:
            failures.append(f"divisor relation {beta} {raw}: {lhs} vs {rhs}")

        lhs, rhs = engine.check_dilaton_relation(beta, pairs)
        counters["dilaton"] += 1
        if lhs != rhs:
            failures.append(f"dilaton relation {beta} {raw}: {lhs} vs {rhs}")

        value = engine.descendant(0, beta, pairs)
        shuffled = pairs[:]
        rng.shuffle(shuffled)
        counters["permutation"] += 1
        if engine.descendant(0, beta, shuffled) != value:
            failures.append(f"permutation {beta} {raw}")

        need = model.dimension + model.c1_pairing(beta) + len(raw) - 3
        have = sum(d + model.degrees[a] for d, a in raw)
        if have != need:
            counters["dimension-vanishing"] += 1
            if value != 0:
                failures.append(f"dimension short-circuit violated {beta} {raw}")
            if unchecked.descendant(0, beta, shuffled) != 0:
                failures.append(f"dimension vanishing violated by recursion {beta} {raw}")

        hot = [p for p, (d, _) in enumerate(sorted(raw)) if d >= 1]
        if any(beta) and len(hot) >= 2:
            core = [(d, 0, basis[a]) for d, a in sorted(raw)]
            values = {engine.generalized(beta, core, reduce_at=j) for j in hot}
            counters["slot-independence"] += 1
            if len(values) != 1:
                failures.append(f"slot choice changed the value {beta} {raw}: {values}")

        if any(beta) and len(raw) >= 3:
            triple = sorted(raw)[:3]
            tri_pairs = [(d, basis[a]) for d, a in triple]
            counters["three-point-agreement"] += 1
            v1 = engine.three_point_descendant(beta, tri_pairs)
            v2 = engine.generalized(beta, [(d, 0, cls) for d, cls in tri_pairs])
            if v1 != v2:
                failures.append(f"three-point routes disagree {beta} {triple}: {v1} vs {v2}")

        if case % 10 == 0 and model.lattice_rank:
            d = rng.randint(1, 3)
            x = basis[rng.randrange(model.rank)]
            y = basis[rng.randrange(model.rank)]
            lhs_s, rhs_s = divisor_product_identity(engine, policy, d, x, y)
            counters["product-compatibility"] += 1
            if lhs_s != rhs_s:
                failures.append(f"product compatibility d={d}: {lhs_s} vs {rhs_s}")

    lines = [f"{name}: {done} checks" for name, done in sorted(counters.items())]
    lines += failures[:10]
    return SuiteResult("identities", not failures, lines)


def suite_two_point_paths(
    model: GeometryModel, primary: PrimaryTable, qmax: int = 3, dmax: int = 3
) -> SuiteResult:
    """Two-point series: engine reductions against the primary-only route."""
    engine = _engine(model, primary)
    policy = model.policy(qmax)
    failures = []
    checked = 0
    basis = [model.basis_class(i) for i in range(model.rank)]
    for d in range(dmax + 1):
        for x in basis:
            for y in basis:
                checked += 1
                via_engine = summed_two_point(engine, d, x, y, policy)
                via_primaries = two_point_from_primaries(model, primary, policy, d, x, y)
                if via_engine != via_primaries:
                    failures.append(f"d={d}: {via_engine} vs {via_primaries}")
    lines = [f"checked {checked} series at levels up to {dmax}"] + failures[:10]
    return SuiteResult("two-point-paths", not failures, lines)


def suite_degree_zero_collapse(
    model: GeometryModel, primary: PrimaryTable, nmax: int = 5, total_max: int = 3
) -> SuiteResult:
    """Mixed powers at curve class zero against the merged-level closed form."""
    engine = _engine(model, primary)
    beta0 = model_beta_zero(model)
    checked = 0
    failures = []
    basis_indices = list(range(model.rank))
    carrying = [
        (d, e, a)
        for d in range(total_max + 1)
        for e in range(total_max + 1)
        for a in basis_indices
        if 1 <= d + e <= total_max
    ]
    plain = [(0, 0, a) for a in basis_indices]
    for n in range(3, nmax + 1):
        for k in range(1, min(n, total_max) + 1):
            for deco in combinations_with_replacement(carrying, k):
                if sum(d + e for d, e, _ in deco) > total_max:
                    continue
                if all(e == 0 for _, e, _ in deco):
                    continue
                for fill in combinations_with_replacement(plain, n - k):
                    key = deco + fill
                    checked += 1
                    triples = [(d, e, model.basis_class(a)) for d, e, a in key]
                    got = engine.generalized(beta0, triples)
                    merged = [(d + e, model.basis_class(a)) for d, e, a in key]
                    want = constant_map_correlator(0, merged, model)
                    if got != want:
                        failures.append(f"{key}: {got} vs {want}")
    lines = [f"checked {checked} mixed-power queries at curve class zero"] + failures[:10]
    return SuiteResult("degree-zero-collapse", not failures, lines)


def _p3_like_model() -> GeometryModel:
    """Throwaway three-fold with divisor-generated cohomology, class zero only."""
    return GeometryModel(
        name="P3",
        dimension=3,
        labels=["one", "h", "h2", "h3"],
        degrees=[0, 1, 2, 3],
        cup_records={
            ("h", "h"): {"h2": Fraction(1)},
            ("h", "h2"): {"h3": Fraction(1)},
            ("h", "h3"): {},
            ("h2", "h2"): {},
            ("h2", "h3"): {},
            ("h3", "h3"): {},
        },
        integral={"h3": Fraction(1)},
        lattice_rank=0,
        divisor_pairing={},
        ample={},
        chern=[
            {"one": Fraction(1)},
            {"h": Fraction(4)},
            {"h2": Fraction(6)},
            {"h3": Fraction(4)},
        ],
    )


def suite_point_vanishing(models: list[GeometryModel] | None = None) -> SuiteResult:
    """Exhaustive vanishing scan for constant-map correlators.

    Every degree pattern outside the three admissible genus cases must give
    exactly zero; admissible patterns may need table entries and are only
    counted, not evaluated.
    """
    from .fixtures import load_fixture
    from .moduli import TautTableError

    if models is None:
        models = [load_fixture(name).model for name in ("point", "P1", "P2")]
        models.append(_p3_like_model())
    checked = 0
    skipped = 0
    failures = []
    for model in models:
        delta = model.dimension
        basis = [model.basis_class(i) for i in range(model.rank)]
        for g in range(0, 3):
            for n in range(0, 6):
                slots = [(d, a) for d in range(0, 4) for a in range(model.rank)]
                for key in combinations_with_replacement(slots, n):
                    exps = [d for d, _ in key]
                    degs = [model.degrees[a] for _, a in key]
                    admissible = _admissible_pattern(g, n, exps, degs, delta)
                    checked += 1
                    if admissible:
                        skipped += 1
                        continue
                    pairs = [(d, basis[a]) for d, a in key]
                    try:
                        value = constant_map_correlator(g, pairs, model, None)
                    except TautTableError:
                        failures.append(f"{model.name} g={g} pattern {key}: table requested outside the admissible cases")
                        continue
                    if value != 0:
                        failures.append(f"{model.name} g={g} pattern {key}: nonzero {value}")
    lines = [
        f"checked {checked} patterns over {len(models or [])} models (dimensions 0..3)",
        f"admissible patterns skipped: {skipped}",
    ] + failures[:10]
    return SuiteResult("point-vanishing", not failures, lines)


def _admissible_pattern(g: int, n: int, exps: list[int], degs: list[int], delta: int) -> bool:
    if g == 0:
        return n >= 3 and sum(exps) == n - 3 and sum(degs) == delta
    if g == 1:
        if n < 1:
            return False
        if sum(exps) == n and sum(degs) == 0:
            return True
        return sum(exps) == n - 1 and sum(degs) == 1 and degs.count(1) == 1
    if delta > 3:
        return False
    return sum(degs) <= delta and sum(exps) + sum(degs) == (g - 1) * (3 - delta) + n


def suite_determinism(model: GeometryModel, primary: PrimaryTable, qmax: int = 2) -> SuiteResult:
    """Byte-identical reports on repeat; cache on and off agree."""
    first = suite_identities(model, primary, count=40, qmax=qmax).render()
    second = suite_identities(model, primary, count=40, qmax=qmax).render()
    lines = []
    ok = True
    if first != second:
        ok = False
        lines.append("repeated identity suite reports differ")
    cached = _engine(model, primary)
    uncached = _engine(model, primary, use_cache=False)
    policy = model.policy(qmax, max_x_degree=3, max_descendant=2)
    basis = [model.basis_class(i) for i in range(model.rank)]
    mismatch = 0
    checked = 0
    for beta in policy.iter_effective():
        for key in combinations_with_replacement([(d, a) for d in range(3) for a in range(model.rank)], 3):
            pairs = [(d, basis[a]) for d, a in key]
            checked += 1
            if cached.descendant(0, beta, pairs) != uncached.descendant(0, beta, pairs):
                mismatch += 1
    if mismatch:
        ok = False
        lines.append(f"cache on/off disagreed on {mismatch} queries")
    lines.append(f"report stability: {'ok' if first == second else 'broken'}")
    lines.append(f"cache transparency: {checked} queries compared")
    return SuiteResult("determinism", ok, lines)


# ----------------------------------------------------------------------

SUITE_NAMES = (
    "point-oracle",
    "transform",
    "enumerative",
    "divisor-independence",
    "identities",
    "two-point-paths",
    "degree-zero-collapse",
    "point-vanishing",
    "determinism",
)


def run_suite(
    name: str,
    model: GeometryModel,
    primary: PrimaryTable,
    qmax: int = 3,
    xdeg: int = 4,
    dmax: int = 3,
    nmax: int = 7,
    count: int = 200,
    seed: int = 20240801,
) -> SuiteResult:
    if name == "point-oracle":
        return suite_point_oracle(model, primary, nmax=nmax)
    if name == "transform":
        return suite_transform(model, primary, qmax=qmax, xdeg=xdeg, dmax=dmax)
    if name == "enumerative":
        return suite_enumerative(model, primary, dmax=min(4, max(2, qmax + 1)))
    if name == "divisor-independence":
        return suite_divisor_independence(model, primary, qmax=qmax, dmax=dmax)
    if name == "identities":
        return suite_identities(model, primary, count=count, seed=seed, qmax=qmax)
    if name == "two-point-paths":
        return suite_two_point_paths(model, primary, qmax=qmax, dmax=dmax)
    if name == "degree-zero-collapse":
        return suite_degree_zero_collapse(model, primary)
    if name == "point-vanishing":
        return suite_point_vanishing()
    if name == "determinism":
        return suite_determinism(model, primary, qmax=min(qmax, 2))
    raise ValueError(f"unknown suite {name!r}; available: {', '.join(SUITE_NAMES)}")
