from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from logging import NullHandler, getLogger
from typing import Dict, Iterator, List, Tuple, Union

import sympy
from sympy.polys.domains import QQ, ZZ
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.rings import PolyElement, ring

from ppcount.arith import FieldValue, mobius
from ppcount.defaults import DYNATOMIC_CAP, ITERATE_CAP, PREPERIOD_CAP
from ppcount.exceptions import PPDegreeCapExceeded, PPNotExactQuotient

log = getLogger(__name__)
log.addHandler(NullHandler())

RING, C, Z = ring("c,z", ZZ)
Z_SYMBOL = sympy.Symbol("z")


@dataclass(frozen=True)
class BivarPoly:
    """Element of Z[c, z]; monomials of poly are (c_degree, z_degree)."""

    poly: PolyElement

    def __post_init__(self):
        object.__setattr__(self, "poly", RING(self.poly))

    @classmethod
    def z(cls) -> "BivarPoly":
        return cls(Z)

    @classmethod
    def constant(cls, value: Union[int, PolyElement]) -> "BivarPoly":
        return cls(RING(value))

    @classmethod
    def from_terms(cls, terms: Dict[Tuple[int, int], int]) -> "BivarPoly":
        """Build from {(z_degree, c_degree): coefficient}."""
        return cls(RING({(j, i): a for (i, j), a in terms.items()}))

    @property
    def deg_z(self) -> int:
        return self.poly.degree(Z) if self.poly else -1

    def __bool__(self) -> bool:
        return bool(self.poly)

    @staticmethod
    def _lift(other) -> PolyElement:
        return other.poly if isinstance(other, BivarPoly) else RING(other)

    def __add__(self, other) -> "BivarPoly":
        return BivarPoly(self.poly + self._lift(other))

    __radd__ = __add__

    def __neg__(self) -> "BivarPoly":
        return BivarPoly(-self.poly)

    def __sub__(self, other) -> "BivarPoly":
        return BivarPoly(self.poly - self._lift(other))

    def __rsub__(self, other) -> "BivarPoly":
        return BivarPoly(self._lift(other) - self.poly)

    def __mul__(self, other) -> "BivarPoly":
        return BivarPoly(self.poly * self._lift(other))

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BivarPoly":
        return BivarPoly(self.poly**n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivarPoly):
            return NotImplemented
        return self.poly == other.poly

    def __hash__(self):
        return hash(self.poly)

    def compose(self, inner: "BivarPoly") -> "BivarPoly":
        """self(c, inner(c, z))."""
        return BivarPoly(self.poly.compose(Z, inner.poly))

    def exquo(self, divisor: "BivarPoly") -> "BivarPoly":
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        try:
            return BivarPoly(self.poly.exquo(divisor.poly))
        except ExactQuotientFailed as exc:
            raise PPNotExactQuotient(
                f"z-degree {divisor.deg_z} does not divide z-degree {self.deg_z} "
                "exactly"
            ) from exc

    def terms(self) -> Iterator[Tuple[int, int, int]]:
        """(z_degree, c_degree, coefficient), z-degree major, both descending."""
        flipped = sorted(((i, j), a) for (j, i), a in self.poly.terms())
        for (i, j), a in reversed(flipped):
            yield i, j, int(a)

    def specialize(self, value: FieldValue) -> List[FieldValue]:
        return specialize(self, value)

    def dump(self) -> str:
        parts = [f"{a}*c^{j}*z^{i}" for i, j, a in self.terms()]
        return " + ".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.dump()


def specialize(poly: BivarPoly, value: FieldValue) -> List[FieldValue]:
    """Coefficients in ascending z-degree after substituting c = value."""
    if isinstance(value, int):
        value = Fraction(value)
    out = [Fraction(0)] * (poly.deg_z + 1)
    powers = {0: Fraction(1)}
    for (j, i), a in poly.poly.terms():
        if j not in powers:
            powers[j] = value**j
        out[i] = out[i] + int(a) * powers[j]
    return out


def univariate(values: List[Fraction]) -> sympy.Poly:
    """Rational coefficient list (ascending) as a sympy Poly over QQ."""
    return sympy.Poly(
        [QQ(int(v.numerator), int(v.denominator)) for v in reversed(values)],
        Z_SYMBOL,
        domain=QQ,
    )


def evaluate(values: List[FieldValue], z: FieldValue) -> FieldValue:
    acc = Fraction(0)
    for a in reversed(values):
        acc = acc * z + a
    return acc


@lru_cache(maxsize=None)
def fc_iterate(n: int) -> BivarPoly:
    if n < 0:
        raise ValueError(f"negative iterate {n}")
    if n > ITERATE_CAP:
        raise PPDegreeCapExceeded(f"iterate {n} exceeds cap {ITERATE_CAP}")
    if n == 0:
        return BivarPoly.z()
    prev = fc_iterate(n - 1)
    return prev * prev + BivarPoly.constant(C)


def degree_D(N: int) -> int:
    if N < 1:
        raise ValueError(f"period must be positive, got {N}")
    return sum(mobius(N // n) * 2**n for n in sympy.divisors(N))


def cycle_bound_R(N: int) -> int:
    if N == 1:
        return 2
    return degree_D(N) // N


@lru_cache(maxsize=None)
def dynatomic(N: int) -> BivarPoly:
    if N < 1:
        raise ValueError(f"period must be positive, got {N}")
    if N > DYNATOMIC_CAP:
        raise PPDegreeCapExceeded(f"period {N} exceeds cap {DYNATOMIC_CAP}")
    num, den = BivarPoly.constant(1), BivarPoly.constant(1)
    for n in sympy.divisors(N):
        mu = mobius(N // n)
        if mu == 1:
            num = num * (fc_iterate(n) - BivarPoly.z())
        elif mu == -1:
            den = den * (fc_iterate(n) - BivarPoly.z())
    result = num.exquo(den)
    log.debug(f"Phi_{N}: deg_z {result.deg_z}")
    return result


@lru_cache(maxsize=None)
def gen_dynatomic(M: int, N: int) -> BivarPoly:
    if M < 1:
        raise ValueError(f"preperiod must be positive, got {M}")
    if M > PREPERIOD_CAP:
        raise PPDegreeCapExceeded(f"preperiod {M} exceeds cap {PREPERIOD_CAP}")
    phi = dynatomic(N)
    num = phi.compose(fc_iterate(M))
    den = phi.compose(fc_iterate(M - 1))
    result = num.exquo(den)
    log.debug(f"Phi_{M},{N}: deg_z {result.deg_z}")
    return result


def factorization_identity(N: int) -> bool:
    """prod over n | N of Phi_n equals f^N(z) - z."""
    product = BivarPoly.constant(1)
    for n in sympy.divisors(N):
        product = product * dynatomic(n)
    return product == fc_iterate(N) - BivarPoly.z()


def telescoping_identity(M: int, N: int) -> bool:
    """prod over m <= M of Phi_{m,N} equals Phi_N(c, f^M(z)) / Phi_N(c, z)."""
    product = BivarPoly.constant(1)
    for m in range(1, M + 1):
        product = product * gen_dynatomic(m, N)
    phi = dynatomic(N)
    return product * phi == phi.compose(fc_iterate(M))


def specialize_dynatomic(N: int, value: FieldValue) -> List[FieldValue]:
    return specialize(dynatomic(N), value)


__all__ = [
    "BivarPoly",
    "cycle_bound_R",
    "degree_D",
    "dynatomic",
    "fc_iterate",
    "gen_dynatomic",
    "specialize",
]
