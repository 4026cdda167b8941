import math
from fractions import Fraction

import pytest

from ppcount.arith import QuadField
from ppcount.defaults import QUAD_PERIOD_CAP
from ppcount.portraits import PortraitLabel, canonical_code, catalog_contains
from ppcount.preper import (
    portrait_Q,
    portrait_quad,
    preper_points_Q,
    preper_points_quad,
    quad_fields_with_new_points,
    skipped_fields,
)

from .fixtures import c_42, c_8211, gaussian, root2


def test_four_two():
    points = preper_points_Q(c_42)
    half = Fraction(1, 2)
    assert set(points.values()) == {half, -3 * half, 3 * half, -half}
    assert points.check()
    by_value = {p.value: (p.preperiod, p.period) for p in points.points}
    assert by_value[half] == (0, 2)
    assert by_value[3 * half] == (1, 2)
    assert str(portrait_Q(c_42)[1]) == "4(2)"


def test_eight_two_one_one():
    points = preper_points_Q(c_8211)
    expected = {Fraction(s * n, 6) for n in (13, 7, 5, 11) for s in (1, -1)}
    assert set(points.values()) == expected
    by_value = {p.value: (p.preperiod, p.period) for p in points.points}
    assert by_value[Fraction(13, 6)] == (0, 1)
    assert by_value[Fraction(-7, 6)] == (0, 1)
    assert by_value[Fraction(5, 6)] == (0, 2)
    assert by_value[Fraction(-13, 6)] == (1, 1)
    assert str(portrait_Q(c_8211)[1]) == "8(2,1,1)"


def test_escaping_and_boundary_cases():
    assert len(preper_points_Q(Fraction(1))) == 0
    assert str(portrait_Q(Fraction(1))[1]) == "∅"
    assert len(preper_points_Q(Fraction(1, 2))) == 0
    graph, label = portrait_Q(Fraction(0))
    assert graph.n == 3
    assert label.is_other


@pytest.mark.parametrize("c", [Fraction(-91, 36), Fraction(-7, 4), Fraction(0)])
def test_methods_agree(c):
    lattice = preper_points_Q(c, method="lattice")
    closure = preper_points_Q(c, method="closure")
    assert set(lattice.values()) == set(closure.values())


def test_gaussian_zero():
    points = preper_points_quad(Fraction(0), gaussian)
    i = gaussian.sqrt_d
    assert set(points.values()) == {0, 1, -1, i, -i}
    graph, label = portrait_quad(Fraction(0), gaussian)
    assert graph.n == 5
    assert label.is_other


def test_quadratic_enlargement():
    points = preper_points_quad(c_42, root2)
    assert len(points) > 4
    assert root2.element(Fraction(1, 2), 1) in points.values()
    _, label = portrait_quad(c_42, root2)
    if not label.is_other:
        assert catalog_contains(label, PortraitLabel.named("4(2)"))


def test_no_new_points_keeps_portrait():
    graph_q, _ = portrait_Q(c_8211)
    graph_k, _ = portrait_quad(c_8211, QuadField(-163))
    assert canonical_code(graph_q) == canonical_code(graph_k)
    assert len(preper_points_quad(Fraction(1), QuadField(-163))) == 0


def test_fields_with_new_points():
    fields = [fld.d for fld, _ in quad_fields_with_new_points(c_42)]
    assert 2 in fields
    assert -1 in [fld.d for fld, _ in quad_fields_with_new_points(Fraction(0))]
    # fixed points and the 2-cycle of z**2 + 1 live in Q(sqrt(-3)) and Q(sqrt(-7))
    found = {fld.d for fld, _ in quad_fields_with_new_points(Fraction(1))}
    assert {-3, -7} <= found


def test_to_json():
    data = preper_points_Q(c_8211).to_json(portrait_Q(c_8211)[1])
    assert data["c"] == "-91/36"
    assert data["label"] == "8(2,1,1)"
    assert len(data["points"]) == 8
    assert len(data["edges"]) == 8


def test_quadratic_to_json():
    points = preper_points_quad(Fraction(0), gaussian)
    data = points.to_json(portrait_quad(Fraction(0), gaussian)[1])
    assert data["field"] == -1
    assert len(data["points"]) == 5
    assert preper_points_Q(c_42).to_json()["field"] is None


def brute_preperiodic(c: Fraction, den: int) -> set:
    """Rationals a/den whose orbit repeats inside the escape radius.

    Preperiodic orbits keep denominators dividing den, so any other denominator
    ends the walk.
    """
    radius = 0.5 + math.sqrt(0.25 + abs(float(c))) + 1e-9
    top = int(radius * den) + 1
    found = set()
    for a in range(-top, top + 1):
        x, seen = Fraction(a, den), []
        for _ in range(30):
            if x in seen or abs(x) > radius or den % x.denominator:
                break
            seen.append(x)
            x = x * x + c
        if x in seen:
            found.add(Fraction(a, den))
    return found


def test_rational_points_are_complete():
    values = [Fraction(n, d * d) for d in (1, 2, 3, 4) for n in range(-2 * d * d, 1)]
    values += [c_8211, Fraction(-29, 16), Fraction(-21, 16)]
    for c in sorted(set(values)):
        den = math.isqrt(c.denominator)
        expected = brute_preperiodic(c, den) if den * den == c.denominator else set()
        assert set(preper_points_Q(c).values()) == expected, c


@pytest.mark.parametrize(
    "c",
    [
        gaussian.element(0, 1),
        root2.element(Fraction(-3, 4), Fraction(1, 2)),
        QuadField(-3).element(Fraction(-1, 2), Fraction(1, 2)),
        QuadField(5).element(Fraction(-1), Fraction(1, 4)),
    ],
)
def test_conjugate_parameters_share_portraits(c):
    graph, label = portrait_quad(c)
    graph_bar, label_bar = portrait_quad(c.conj())
    assert canonical_code(graph) == canonical_code(graph_bar)
    assert str(label) == str(label_bar)
    conjugated = {x.conj() for x in preper_points_quad(c).values()}
    assert conjugated == set(preper_points_quad(c.conj()).values())


def test_period_cap_reports_skipped_fields(caplog):
    # Phi_2 of z**2 + 1 has discriminant -7, the fixed points live in Q(sqrt(-3))
    assert -7 in skipped_fields(Fraction(1), 1)
    assert skipped_fields(Fraction(1), QUAD_PERIOD_CAP) == []
    capped = quad_fields_with_new_points(Fraction(1), period_cap=1)
    assert [fld.d for fld, _ in capped] == [-3]
    assert all("skipped by period cap" in points.notes[-1] for _, points in capped)
    assert "skipped" in caplog.text
    full = quad_fields_with_new_points(Fraction(1))
    assert all(not points.notes for _, points in full)
