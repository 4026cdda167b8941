import math
from fractions import Fraction

import pytest

from ppcount.arith import iter_rationals, mobius
from ppcount.census import (
    census_deg1,
    census_deg2,
    compare_report,
    count_label_deg1,
    count_NQ1_direct,
    count_rationals,
    enum_rationals,
    fiber_size_report,
    projective_images,
    verify_gcd_lemma,
)
from ppcount.census.census import (
    ExhaustiveCensusDeg2,
    ParametrizedCensusDeg1,
    Tally,
    _classify_deg2_shard,
    rows_by_label,
)
from ppcount.census.enumerate import mobius_sieve, square_denominator_rationals
from ppcount.census.report import census_json, census_tsv, error_scale
from ppcount.constants import area_R1
from ppcount.defaults import VERIFY_FIBER_MAX_EXCEPTIONS, VERIFY_NQ1_RESIDUAL_C
from ppcount.exceptions import PPCensusRefused
from ppcount.maps import LABELS
from ppcount.portraits import PortraitLabel
from ppcount.utils import iv_to_pair

from .fixtures import c_42, c_8211, pair_8211


def test_enum_rationals():
    assert set(enum_rationals(1)) == {0, 1, -1}
    assert len(list(enum_rationals(2))) == 7
    with pytest.raises(ValueError):
        list(enum_rationals(0))


def test_count_rationals():
    assert count_rationals(1) == 3
    assert count_rationals(2) == 7
    assert count_rationals(30) == len(list(enum_rationals(30)))
    B = 10**4
    main = 2 / (math.pi**2 / 6) * B * B
    assert abs(count_rationals(B) - main) <= 10 * B * math.log(B)


def test_mobius_sieve():
    mu = mobius_sieve(60)
    assert mu[0] == 0
    assert [int(m) for m in mu[1:]] == [mobius(n) for n in range(1, 61)]


def test_square_denominators_are_sharded():
    whole = set(square_denominator_rationals(50))
    parts = [set(square_denominator_rationals(50, s, 3)) for s in range(3)]
    assert set().union(*parts) == whole
    assert sum(len(p) for p in parts) == len(whole)
    assert all(math.isqrt(c.denominator) ** 2 == c.denominator for c in whole)


def test_gcd_lemma():
    assert pair_8211(1, 2)[1] != 0
    assert math.gcd(*pair_8211(1, 2)) == 1
    assert pair_8211(1, 1) == (-16, 0)
    assert verify_gcd_lemma(40).ok


def test_projective_count_matches_brute_force():
    B = 100
    brute = 0
    points = [(x.numerator, x.denominator) for x in iter_rationals(30)] + [(1, 0)]
    for a, b in points:
        g0, g1 = pair_8211(a, b)
        g = math.gcd(g0, g1)
        if max(abs(g0), abs(g1)) <= B * g:
            brute += 1
    assert count_NQ1_direct("8(2,1,1)", B) == brute
    images = [c for row in projective_images(pair_8211, 91) for _, c in row.fractions()]
    assert c_8211 in images


@pytest.mark.parametrize("B", [10**4, 10**6])
def test_projective_count_residual(B):
    area = iv_to_pair(area_R1(pair_8211))["value"]
    main = area / (math.pi**2 / 6) * B**0.5
    residual = abs(count_NQ1_direct("8(2,1,1)", B) - main)
    assert residual <= VERIFY_NQ1_RESIDUAL_C * B**0.25 * math.log(B)


def test_tally_merge_is_associative():
    a, b, c = Tally(), Tally(), Tally()
    a.add(Fraction(1), PortraitLabel.named("∅"), 0)
    b.add(c_42, PortraitLabel.named("4(2)"), 4)
    c.add(c_8211, PortraitLabel.named("8(2,1,1)"), 8)
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.counts == right.counts


def test_exhaustive_deg1():
    rows = rows_by_label(census_deg1(100, "exhaustive", shards=4))
    assert set(LABELS) <= set(rows)
    assert rows["4(2)"].count >= 1
    assert rows["8(2,1,1)"].count >= 1
    assert sum(row.count for row in rows.values()) == count_rationals(100)


def test_parametrized_matches_exhaustive():
    exhaustive = rows_by_label(census_deg1(200, "exhaustive", shards=4))
    parametrized = rows_by_label(census_deg1(200, "parametrized", shards=4))
    for label in LABELS:
        assert exhaustive[label].count == parametrized[label].count, label


def test_parametrized_refuses_small_bounds():
    with pytest.raises(PPCensusRefused):
        ParametrizedCensusDeg1(2)


def test_workers_do_not_change_output():
    one = census_json(census_deg1(100, "parametrized", workers=1, shards=4))
    two = census_json(census_deg1(100, "parametrized", workers=2, shards=4))
    assert one == two


def test_label_count():
    rows = rows_by_label(census_deg1(200, "exhaustive", shards=4))
    assert count_label_deg1("8(2,1,1)", 200) == rows["8(2,1,1)"].count
    assert count_label_deg1("4(2)", 200) == rows["4(2)"].count


def test_deg2_rows():
    rows = census_deg2(2, ["8(2,1,1)"], shards=2)
    assert len(rows) == 1
    row = rows[0]
    assert row.degree == 2
    assert row.orbit_count <= row.count <= 2 * row.orbit_count


@pytest.mark.parametrize("B", [3, 5])
def test_deg2_modes_agree(B):
    labels = ["4(2)", "6(3)", "8(2,1,1)"]
    parametrized = rows_by_label(census_deg2(B, labels, shards=2))
    exhaustive = rows_by_label(census_deg2(B, labels, mode="exhaustive", shards=2))
    for label in labels:
        assert parametrized[label].count == exhaustive[label].count
        assert parametrized[label].orbit_count == exhaustive[label].orbit_count


def test_deg2_flags_fields_beyond_period_cap(monkeypatch):
    monkeypatch.setattr("ppcount.census.census.skipped_fields", lambda c, cap: [-7])
    tally = _classify_deg2_shard([Fraction(1)], ["4(2)", "6(2)"])
    assert [a.reason for a in tally.anomalies] == ["cap-boundary", "cap-boundary"]
    assert sorted(a.label for a in tally.anomalies) == ["4(2)", "6(2)"]
    assert "-7" in tally.anomalies[0].detail
    assert tally.examined == 1


def test_deg2_exhaustive_cap():
    with pytest.raises(PPCensusRefused):
        ExhaustiveCensusDeg2(10**3, ["8(2,1,1)"])


def test_fiber_sizes():
    report = fiber_size_report(bound=10**3, count=5)
    assert report.ok
    assert len(report.exceptions) <= VERIFY_FIBER_MAX_EXCEPTIONS


def test_compare_empty_label():
    rows = compare_report("∅", 1, [50, 100])
    assert [row.B for row in rows] == [50, 100]
    assert rows[-1].ratio == pytest.approx(1, abs=0.1)
    assert error_scale("∅", 1, 100) == pytest.approx(100 * math.log(100))


def test_census_tsv():
    text = census_tsv(census_deg1(20, "exhaustive", shards=2))
    lines = text.splitlines()
    assert lines[0].split("\t") == list(
        ("label", "B", "degree", "mode", "count", "anomaly_count")
    )
    assert lines[1].startswith("empty\t20\t1\texhaustive\t")
