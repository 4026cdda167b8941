import math
import random
from fractions import Fraction

import numpy as np
import pytest

from ppcount.arith import (
    IntPoly,
    QuadField,
    height_quadratic,
    height_rational,
    is_perfect_square,
    iter_quadratic_minpolys,
    iter_rationals,
    mobius,
    padic_val,
    parse_quad,
    parse_rat,
    quad_arith,
    quadratic_roots,
    squarefree_part,
)
from ppcount.exceptions import (
    PPCompositeModulus,
    PPFieldMismatch,
    PPInvalidPolynomial,
    PPParseError,
)

from ppcount.utils import iv_bounds

from .fixtures import gaussian, root2


def test_mobius():
    assert mobius(1) == 1
    assert mobius(4) == 0
    assert mobius(6) == 1
    assert mobius(30) == -1


def test_padic_val():
    assert padic_val(12, 2) == 2
    assert padic_val(Fraction(-91, 36), 3) == -2
    assert padic_val(0, 5) == math.inf
    with pytest.raises(PPCompositeModulus):
        padic_val(12, 4)


def test_perfect_square():
    assert is_perfect_square(36) == 6
    assert is_perfect_square(35) is None
    assert is_perfect_square(0) == 0
    with pytest.raises(ValueError):
        is_perfect_square(-4)


def test_height_rational():
    assert height_rational(Fraction(-91, 36)) == 91
    assert height_rational(Fraction(0)) == 1
    assert height_rational(Fraction(1, 4)) == 4


def test_height_quadratic():
    golden = height_quadratic(IntPoly((-1, -1, 1)))
    assert golden.value == pytest.approx(1.27202, abs=1e-5)
    assert height_quadratic(IntPoly((-2, 0, 1))).value == pytest.approx(2**0.5)
    assert height_quadratic(IntPoly((1, 0, 1))).value == pytest.approx(1.0)


def test_height_comparator_is_exact():
    enclosure = height_quadratic(IntPoly((-2, 0, 1)))
    assert enclosure.at_most(2)
    assert not enclosure.at_most(1)
    with pytest.raises(PPInvalidPolynomial):
        height_quadratic(IntPoly((-1, 0, 1)))


def test_imaginary_enclosure():
    lo, hi = iv_bounds(height_quadratic(IntPoly((1, 0, 1))).interval())
    assert lo <= 1 <= hi
    lo, hi = iv_bounds(height_quadratic(IntPoly((3, 1, 2))).interval())
    assert lo <= 3**0.5 <= hi


def test_comparator_agrees_with_enclosure():
    rng = random.Random(5)
    checked = 0
    while checked < 400:
        a, b, c = rng.randint(1, 40), rng.randint(-40, 40), rng.randint(-40, 40)
        disc = b * b - 4 * a * c
        if math.gcd(math.gcd(a, b), c) != 1:
            continue
        if disc >= 0 and is_perfect_square(disc) is not None:
            continue
        checked += 1
        enclosure = height_quadratic(IntPoly((c, b, a)))
        roots = np.roots([a, b, c])
        mahler = a * np.prod(np.maximum(1.0, np.abs(roots)))
        assert enclosure.value == pytest.approx(math.sqrt(mahler), rel=1e-7)
        lo, hi = (float(x) for x in iv_bounds(enclosure.interval()))
        for bound in (1, 2, 3, 4, Fraction(9, 2), 6, Fraction(13, 2), 9):
            if hi < bound:
                assert enclosure.at_most(bound)
            elif lo > bound:
                assert not enclosure.at_most(bound)


def test_quad_arith():
    i = gaussian.sqrt_d
    assert quad_arith(1 + i, 1 - i, "mul") == 2
    assert quad_arith(root2.sqrt_d, None, "inv") == root2.element(0, Fraction(1, 2))
    five = QuadField(5)
    assert quad_arith(five.element(3, 2), None, "conj") == five.element(3, -2)


def test_field_mismatch():
    with pytest.raises(PPFieldMismatch):
        gaussian.sqrt_d + root2.sqrt_d


def test_sqrt_in_field():
    assert gaussian.element(-1).sqrt() == gaussian.sqrt_d
    assert root2.element(2).sqrt() == root2.sqrt_d
    assert root2.element(3).sqrt() is None


def test_parse():
    assert parse_rat("-91/36") == Fraction(-91, 36)
    assert parse_rat("1e6") == 10**6
    with pytest.raises(PPParseError):
        parse_rat("1/0")
    with pytest.raises(PPParseError):
        parse_rat("abc")
    value = parse_quad("1+sqrt(-1)")
    assert value == gaussian.element(1, 1)
    assert parse_quad("0", -1) == gaussian.element(0, 0)
    assert parse_quad("-7/4") == Fraction(-7, 4)


def test_squarefree_part():
    assert squarefree_part(8) == 2
    assert squarefree_part(-36) == -1


def test_iter_rationals():
    assert set(iter_rationals(1)) == {0, 1, -1}
    values = list(iter_rationals(2))
    assert len(values) == 7
    assert len(set(values)) == 7


def test_quadratic_minpolys():
    polys = list(iter_quadratic_minpolys(1))
    assert IntPoly((1, 0, 1)) in polys
    for poly in polys:
        assert height_quadratic(poly).at_most(1)
    r, s = quadratic_roots(IntPoly((-2, 0, 1)))
    assert r * r == 2
    assert s == r.conj()
