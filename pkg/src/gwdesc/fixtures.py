"""Built-in geometries (projective line, projective plane, point).

The fixture data lives in JSON files with the same schema a user would
supply; the plane's primary table is cross-checked against the classical
associativity recursion for rational plane curve counts, which acts as the
independent oracle for everything enumerative in the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import comb

from .engine import PrimaryTable
from .geometry import GeometryModel, ModelError
from .moduli import TautTable

FIXTURE_NAMES = ("P1", "P2", "point")


@dataclass
class FixtureModel:
    model: GeometryModel
    primary: PrimaryTable


def _data_text(filename: str) -> str:
    return resources.files("gwdesc.data").joinpath(filename).read_text(encoding="utf-8")


def load_fixture(name: str) -> FixtureModel:
    """Load and validate a built-in geometry with its primary table."""
    if name not in FIXTURE_NAMES:
        raise ModelError(f"unknown fixture {name!r}; available: {', '.join(FIXTURE_NAMES)}")
    stem = name.lower()
    model = GeometryModel.from_dict(json.loads(_data_text(f"{stem}.geometry.json")))
    report = model.validate()
    if not report.ok:
        raise ModelError(f"fixture {name} failed validation:\n{report}")
    try:
        rows = json.loads(_data_text(f"{stem}.primary.json"))
    except FileNotFoundError:
        rows = []
    primary = PrimaryTable.from_records(model, rows)
    return FixtureModel(model=model, primary=primary)


def genus1_taut_table() -> TautTable:
    """Small table of genus-1 psi and lambda-psi integrals (n <= 2)."""
    return TautTable.from_records(json.loads(_data_text("taut.genus1.json")))


def plane_curve_counts(dmax: int) -> dict[int, Fraction]:
    """Counts of rational plane curves of degree d through 3d-1 points.

    The classical recursion coming from associativity of the quantum
    product, seeded with a single line through two points.  Used only as an
    oracle: it is independent of the correlator engine.
    """
    if dmax < 1:
        raise ValueError("need dmax >= 1")
    counts: dict[int, Fraction] = {1: Fraction(1)}
    for d in range(2, dmax + 1):
        total = Fraction(0)
        for d1 in range(1, d):
            d2 = d - d1
            total += (
                counts[d1]
                * counts[d2]
                * d1 ** 2
                * d2
                * (d2 * comb(3 * d - 4, 3 * d1 - 2) - d1 * comb(3 * d - 4, 3 * d1 - 1))
            )
        counts[d] = total
    return counts


def p2_primary_records() -> list[dict]:
    """Regenerate the plane's primary table from the oracle seed.

    Only the line class admits a dimension-consistent three-point entry; its
    value is the degree-1 count.  The drift test compares this against the
    shipped data file.
    """
    counts = plane_curve_counts(1)
    return [
        {"beta": [1], "classes": ["h", "h2", "h2"], "value": str(counts[1])}
    ]


def shipped_p2_primary_records() -> list[dict]:
    return json.loads(_data_text("p2.primary.json"))
