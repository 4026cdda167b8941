from fractions import Fraction

import pytest

from ppcount.dynatomic import (
    BivarPoly,
    cycle_bound_R,
    degree_D,
    dynatomic,
    factorization_identity,
    fc_iterate,
    gen_dynatomic,
    specialize,
    specialize_dynatomic,
    telescoping_identity,
)
from ppcount.exceptions import PPDegreeCapExceeded, PPNotExactQuotient


def test_iterates():
    assert fc_iterate(1) == BivarPoly.from_terms({(2, 0): 1, (0, 1): 1})
    second = BivarPoly.from_terms({(4, 0): 1, (2, 1): 2, (0, 2): 1, (0, 1): 1})
    assert fc_iterate(2) == second
    assert fc_iterate(3).deg_z == 8


def test_dynatomic_small():
    assert dynatomic(1) == BivarPoly.from_terms({(2, 0): 1, (1, 0): -1, (0, 1): 1})
    phi2 = BivarPoly.from_terms({(2, 0): 1, (1, 0): 1, (0, 1): 1, (0, 0): 1})
    assert dynatomic(2) == phi2
    assert dynatomic(3).deg_z == 6


def test_degrees():
    assert degree_D(2) == 2
    assert degree_D(4) == 12
    assert cycle_bound_R(3) == 2
    assert cycle_bound_R(1) == 2
    for N in range(1, 6):
        assert dynatomic(N).deg_z == degree_D(N)


def test_generalized():
    assert gen_dynatomic(1, 1) == BivarPoly.from_terms(
        {(2, 0): 1, (1, 0): 1, (0, 1): 1}
    )
    assert gen_dynatomic(2, 1).deg_z == 4
    assert gen_dynatomic(1, 2).deg_z == 2


def test_identities():
    for N in range(1, 5):
        assert factorization_identity(N)
    for M in range(1, 3):
        for N in range(1, 3):
            assert telescoping_identity(M, N)


def test_specialize():
    c = Fraction(-7, 4)
    assert specialize(dynatomic(1), c) == [c, -1, 1]
    assert specialize_dynatomic(2, c) == [Fraction(-3, 4), 1, 1]
    assert specialize(dynatomic(1), 0) == [0, -1, 1]


def test_caps():
    with pytest.raises(PPDegreeCapExceeded):
        dynatomic(99)
    with pytest.raises(ValueError):
        dynatomic(0)


def test_bivariate_arithmetic():
    f = fc_iterate(1)
    assert f.compose(f) == fc_iterate(2)
    assert (f * f - f * f) == BivarPoly.constant(0)
    assert not BivarPoly.constant(0)
    assert BivarPoly.constant(0).deg_z == -1
    phi2 = dynatomic(2)
    assert (phi2 * dynatomic(1)).exquo(phi2) == dynatomic(1)
    with pytest.raises(PPNotExactQuotient):
        fc_iterate(2).exquo(dynatomic(2))
    assert list(dynatomic(1).terms()) == [(2, 0, 1), (1, 0, -1), (0, 1, 1)]
