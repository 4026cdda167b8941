import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from ppcount.arith import IntPoly
from ppcount.constants import (
    arch_volume_p1,
    area_R1,
    leading_constant,
    leading_constant_deg1,
    leading_constant_deg2,
    local_density,
    mahler_inf,
    mahler_p,
    max_common_valuation,
    padic_local_factor,
    padic_region_volume,
    vol_S1,
    zeta_val,
)
from ppcount.constants.mahler import mahler_quadratic_np
from ppcount.curves import HomPair, sym2_halves_at_2, sym2_map_8211
from ppcount.exceptions import PPNonCoprimeForms, PPUnsupported
from ppcount.utils import iv_bounds, iv_to_pair

from .fixtures import pair_8211

LINE = HomPair(IntPoly((0, 1)), IntPoly((1,)), 1)


def mid(value) -> float:
    return iv_to_pair(value)["value"]


def contains(value, target) -> bool:
    lo, hi = iv_bounds(value)
    return lo <= target <= hi


def test_zeta():
    assert contains(zeta_val(2), mpmath.pi**2 / 6)
    assert mid(zeta_val(2)) == pytest.approx(math.pi**2 / 6, abs=1e-12)
    assert mid(zeta_val(3)) == pytest.approx(1.202056903159594, abs=1e-12)
    with pytest.raises(ValueError):
        zeta_val(4)


def test_mahler_inf():
    assert mid(mahler_inf(IntPoly((6, -5, 1)))) == pytest.approx(6)
    assert mid(mahler_inf(IntPoly((1, 0, 1)))) == pytest.approx(1)
    assert mid(mahler_inf(IntPoly((16, 128, 256)))) == pytest.approx(256)
    assert mid(mahler_inf([-1, -1, 1])) == pytest.approx((1 + 5**0.5) / 2)
    assert mid(mahler_inf(IntPoly((2, 0, 0, 1)))) == pytest.approx(2)


def test_mahler_p():
    assert mahler_p(IntPoly((1, 2, 4)), 2) == 1
    assert mahler_p(IntPoly((4, 2)), 2) == Fraction(1, 2)
    assert mahler_p(IntPoly((-2, 0, 1)), 7) == 1


def test_mahler_vectorized():
    a = [256.0, 1.0, 0.0]
    b = [-128.0, 5.0, 3.0]
    c = [16.0, 6.0, 1.0]
    out = mahler_quadratic_np(np.array(a), np.array(b), np.array(c))
    assert out == pytest.approx([256.0, 6.0, 3.0])


def test_arch_volume():
    line = arch_volume_p1(IntPoly((0, 1)), IntPoly((1,)), 1, 2)
    assert mid(line) == pytest.approx(4, rel=1e-6)
    square = arch_volume_p1(IntPoly((0, 0, 1)), IntPoly((1,)), 2, 2)
    assert mid(square) == pytest.approx(4, rel=1e-6)
    with pytest.raises(PPNonCoprimeForms):
        arch_volume_p1(IntPoly((0, 1)), IntPoly((0, 2)), 1, 2)


def test_area_of_square():
    area = area_R1(HomPair(IntPoly((0, 0, 1)), IntPoly((1,)), 2))
    assert contains(area, 4)


def test_area_matches_quadrature():
    area = mid(area_R1(pair_8211))
    arch = mid(arch_volume_p1(pair_8211.g0, pair_8211.g1, pair_8211.k, 2))
    assert area == pytest.approx(arch, rel=1e-3)


def test_padic_volumes():
    assert padic_region_volume(LINE, 5) == 1
    assert padic_region_volume(LINE, 5, chart="affine-Z_p-box") == 1
    assert padic_region_volume(pair_8211, 2) == 2
    assert padic_region_volume(pair_8211, 3) == 1
    assert padic_region_volume(sym2_map_8211(), 2) == 16
    for p in (3, 5, 7, 11, 13, 17, 19):
        assert padic_region_volume(sym2_map_8211(), p) == 1
    with pytest.raises(ValueError):
        padic_region_volume(LINE, 5, chart="adelic")


def test_sym2_region_at_2_contains_halves():
    assert sym2_halves_at_2()
    assert all(value % 16 == 0 for value in sym2_map_8211()(3, -5, 2))
    assert all(value % 16 == 0 for value in sym2_map_8211()(1, 1, 0))


def test_local_factor_weights():
    assert padic_local_factor(LINE, 5) == 1
    assert padic_local_factor(pair_8211, 2) == 2
    # common valuation 1 on y even, which the Haar volume rounds down
    forms = [{(2, 0): 2}, {(0, 2): 1}]
    assert local_density(forms, 2) == {0: Fraction(1, 2), 1: Fraction(1, 4)}
    assert padic_region_volume(forms, 2) == 1
    assert contains(padic_local_factor(forms, 2), 4 / 3)
    factor = padic_local_factor(sym2_map_8211(), 2)
    if not isinstance(factor, Fraction):
        factor = iv_bounds(factor)[0]
    assert factor >= 16


def test_local_density():
    density = local_density(pair_8211, 2)
    assert sum(density.values()) == 1 - Fraction(1, 4)
    assert max_common_valuation(pair_8211, 2) == 4
    assert max_common_valuation(pair_8211, 3) == 0


def test_vol_S1_is_seeded():
    first = vol_S1(sym2_map_8211(), seed=3, log2_points=10, replicates=4)
    again = vol_S1(sym2_map_8211(), seed=3, log2_points=10, replicates=4)
    assert first == again
    assert first.value > 0
    assert first.points == 1024


def test_empty_label_constant():
    constant = leading_constant_deg1("∅")
    assert constant.a == 2
    assert mid(constant.c) == pytest.approx(2 / (math.pi**2 / 6), rel=1e-6)
    assert mid(constant.c) == pytest.approx(1.21585, abs=1e-5)


def test_8211_degree1_constant():
    constant = leading_constant_deg1("8(2,1,1)")
    assert constant.a == Fraction(1, 2)
    assert constant.check()
    arch = mid(arch_volume_p1(pair_8211.g0, pair_8211.g1, 4, 2))
    assert mid(constant.c) == pytest.approx(arch / (4 * math.pi**2 / 6), rel=1e-6)
    places = {str(local.place): local.value for local in constant.decomposition}
    assert places["2"] == 2


def test_42_degree1_constant():
    constant = leading_constant("4(2)", 1)
    assert constant.a == 1
    assert constant.check()
    assert constant.predict(100) == pytest.approx(mid(constant.c) * 100)


def test_8211_degree2_constant():
    constant = leading_constant_deg2("8(2,1,1)")
    assert constant.a == Fraction(3, 2)
    assert constant.check()
    assert constant.mc.stderr < 0.01 * constant.mc.value
    volume = constant.mc.value
    expected = volume / (8 * 1.202056903159594)
    assert mid(constant.reassemble("archimedean")) == pytest.approx(expected, rel=1e-6)
    finite = mid(constant.finite_factor)
    assert finite >= 16
    assert mid(constant.c) == pytest.approx(expected * finite, rel=1e-6)
    assert "2" in [str(local.place) for local in constant.decomposition]
    assert mid(constant.per_conjugate) == pytest.approx(2 * mid(constant.c))
    data = constant.to_json()
    assert data["zeta"]["s"] == 3
    assert data["monte_carlo"]["points"] == constant.mc.points
    assert data["archimedean_part"]["value"] == pytest.approx(expected, rel=1e-6)


def test_genus_one_degree2_unsupported():
    with pytest.raises(PPUnsupported):
        leading_constant_deg2("8(1,1)a")
    with pytest.raises(PPUnsupported):
        leading_constant_deg1("8(1,1)a", rank=1)
