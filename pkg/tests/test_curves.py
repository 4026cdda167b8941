from fractions import Fraction
from itertools import islice

import numpy as np
import pytest

from ppcount.arith import QuadElem
from ppcount.curves import (
    archimedean_floor,
    bad_primes,
    eval_pi,
    generate_c_degree1,
    generate_cK_degree2,
    get_record,
    height_lower_bound,
    load_catalog,
    solve_fiber,
    sym2_forms,
    sym2_map_8211,
    verify_aut,
    verify_sym2,
)
from ppcount.defaults import BOX_SAFETY
from ppcount.exceptions import PPUnknownLabel
from ppcount.maps import LABELS

from .fixtures import c_42, c_8211, pair_8211, record_42, record_8211, root2


def test_catalog_covers_labels():
    assert sorted(load_catalog()) == sorted(LABELS)
    with pytest.raises(PPUnknownLabel):
        get_record("12(2,2)")


def test_eval_pi():
    assert eval_pi("8(2,1,1)", Fraction(2)) == c_8211
    assert eval_pi("4(2)", Fraction(1)) == c_42
    assert eval_pi("8(2,1,1)", Fraction(1)) is None


def test_solve_fiber():
    expected = [Fraction(-2), Fraction(-1, 2), Fraction(1, 2), Fraction(2)]
    assert solve_fiber("8(2,1,1)", c_8211) == expected
    assert solve_fiber("4(2)", c_42) == [Fraction(-1), Fraction(1)]
    assert solve_fiber("8(2,1,1)", Fraction(0)) == []


@pytest.mark.parametrize("label", ["6(3)", "8(2,1,1)", "4(2)", "6(2)"])
def test_automorphisms(label):
    report = verify_aut(label)
    assert report.ok, report.failures


def test_aut_order():
    assert record_8211.aut_order == 4
    assert verify_aut("8(2,1,1)").order == 4


def test_sym2_exemplar():
    h0, h1, h2 = sym2_map_8211()(1, 0, 1)
    assert (h0, h1, h2) == (256, -128, 16)


def test_pi_at_quadratic_point():
    assert eval_pi("8(2,1,1)", root2.element(0, 1)) == Fraction(-35, 4)
    # 1 - sqrt(2) = -1/(1 + sqrt(2)) lies in the automorphism orbit
    assert eval_pi("8(2,1,1)", root2.element(1, 1)).is_rational
    assert not eval_pi("8(2,1,1)", root2.element(2, 1)).is_rational


def test_sym2_convention():
    report = verify_sym2(samples=40)
    assert report.ok
    assert sym2_forms(pair_8211, report.convention) == sym2_map_8211()


def test_degree1_generation():
    pairs = list(generate_c_degree1("8(2,1,1)", 2))
    assert (Fraction(2), c_8211) in pairs
    assert all(c == eval_pi("8(2,1,1)", x) for x, c in pairs if x is not None)


def test_degree2_generation():
    found = list(islice(generate_cK_degree2("8(2,1,1)", 2), 400))
    assert (Fraction(-35, 4), root2) in [(c, k) for c, k in found]
    assert any(isinstance(c, QuadElem) for c, _ in found)


def test_bad_primes_and_height_bound():
    assert bad_primes(pair_8211) == [2]
    assert height_lower_bound(pair_8211) > 0


def form_values(pair, which, a, b):
    coeffs = pair.coefficients(which)
    return sum(x * a**j * b ** (pair.k - j) for j, x in enumerate(coeffs))


@pytest.mark.parametrize("label", ["4(2)", "6(2)", "6(3)", "8(2,1,1)"])
def test_complex_floor(label):
    pair = get_record(label).pi.homogenize()
    real = archimedean_floor(pair)
    floor = archimedean_floor(pair, complex_points=True)
    assert 0 < floor <= real
    assert height_lower_bound(pair, complex_points=True) <= height_lower_bound(pair)
    rng = np.random.default_rng(7)
    t = np.sqrt(rng.random(5000)) * np.exp(2j * np.pi * rng.random(5000))
    ones = np.ones_like(t)
    for a, b in ((t, ones), (ones, t)):
        g0, g1 = (form_values(pair, which, a, b) for which in (0, 1))
        assert np.maximum(np.abs(g0), np.abs(g1)).min() >= float(BOX_SAFETY) * floor


def test_complex_floor_drops_for_42():
    pair = record_42.pi.homogenize()
    assert archimedean_floor(pair, complex_points=True) < archimedean_floor(pair)
