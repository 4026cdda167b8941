import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from logging import NullHandler, getLogger
from typing import Iterator, Optional, Tuple, Union

import mpmath
import sympy
from sympy import factorint, isprime, multiplicity

from ppcount.defaults import MP_DPS
from ppcount.exceptions import (
    PPCompositeModulus,
    PPFieldMismatch,
    PPInvalidPolynomial,
    PPParseError,
)
from ppcount.utils import iv_dps, iv_rat

log = getLogger(__name__)
log.addHandler(NullHandler())

Rat = Fraction

RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
QUAD_RE = re.compile(
    r"^(?P<u>.*?)(?P<sign>[+-]?)\s*(?P<v>\d+(?:/\d+)?)?\s*\*?\s*"
    r"sqrt\(\s*(?P<d>[+-]?\d+)\s*\)\s*$"
)


def parse_rat(text: Union[str, int, Fraction]) -> Fraction:
    """Parse "a/b" or "a" into a canonical rational."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = str(text).strip()
    match = RAT_RE.match(text)
    if match is None:
        # scientific shorthand like 1e6 is accepted for integers only
        try:
            value = float(text)
        except ValueError:
            raise PPParseError(f"not a rational: {text!r}")
        if not value.is_integer():
            raise PPParseError(f"not a rational: {text!r}")
        return Fraction(int(value))
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise PPParseError(f"zero denominator: {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rat(x: Fraction) -> str:
    return str(Fraction(x))


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError(f"mobius undefined for {n}")
    factors = factorint(n)
    if any(e > 1 for e in factors.values()):
        return 0
    return -1 if len(factors) % 2 else 1


def padic_val(x: Union[int, Fraction], p: int) -> Union[int, float]:
    """v_p(x), with math.inf for x = 0."""
    if p < 2 or not isprime(p):
        raise PPCompositeModulus(f"{p} is not prime")
    x = Fraction(x)
    if x == 0:
        return math.inf
    return multiplicity(p, abs(x.numerator)) - multiplicity(p, x.denominator)


def is_perfect_square(n: int) -> Optional[int]:
    if n < 0:
        raise ValueError(f"negative input {n}")
    root = math.isqrt(n)
    return root if root * root == n else None


def rat_sqrt(x: Fraction) -> Optional[Fraction]:
    """Rational square root, or None."""
    x = Fraction(x)
    if x < 0:
        return None
    num = is_perfect_square(x.numerator)
    den = is_perfect_square(x.denominator)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel: n = squarefree_part(n) * m**2."""
    if n == 0:
        raise ValueError("zero has no squarefree part")
    core = -1 if n < 0 else 1
    for prime, exp in factorint(abs(n)).items():
        if exp % 2:
            core *= prime
    return core


def height_rational(c: Fraction) -> int:
    c = Fraction(c)
    return max(abs(c.numerator), c.denominator)


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, coefficients in ascending degree."""

    coeffs: Tuple[int, ...]

    def __post_init__(self):
        coeffs = [int(a) for a in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise PPInvalidPolynomial("zero polynomial")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1]

    @property
    def content(self) -> int:
        return reduce(math.gcd, self.coeffs)

    def is_primitive(self) -> bool:
        return self.content == 1

    def primitive(self) -> "IntPoly":
        g = self.content
        sign = -1 if self.lead < 0 else 1
        return IntPoly(tuple(sign * a // g for a in self.coeffs))

    def __call__(self, x):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def homogeneous(self, x, y, k: int):
        """y**k * self(x/y) evaluated without division."""
        acc = 0
        for i, a in enumerate(self.coeffs):
            acc += a * x**i * y ** (k - i)
        return acc

    def discriminant(self) -> int:
        if self.degree != 2:
            return int(sympy.discriminant(self.to_sympy()))
        c, b, a = self.coeffs
        return b * b - 4 * a * c

    def to_sympy(self, gen: sympy.Symbol = None) -> sympy.Poly:
        gen = gen or sympy.Symbol("x")
        return sympy.Poly(list(reversed(self.coeffs)), gen, domain="ZZ")

    def __str__(self) -> str:
        terms = []
        for i, a in enumerate(self.coeffs):
            if a:
                terms.append(f"{a}*x^{i}" if i else f"{a}")
        return " + ".join(reversed(terms))


@dataclass(frozen=True)
class QuadField:
    d: int

    def __post_init__(self):
        if self.d in (0, 1):
            raise ValueError(f"Q(sqrt({self.d})) is not a quadratic field")
        if squarefree_part(self.d) != self.d:
            raise ValueError(f"{self.d} is not squarefree")

    @property
    def is_real(self) -> bool:
        return self.d > 0

    @property
    def half_integral(self) -> bool:
        """Ring of integers has basis (1, (1+sqrt(D))/2)."""
        return self.d % 4 == 1

    @property
    def discriminant(self) -> int:
        return self.d if self.half_integral else 4 * self.d

    def element(self, u=0, v=0) -> "QuadElem":
        return QuadElem(self, Fraction(u), Fraction(v))

    @property
    def sqrt_d(self) -> "QuadElem":
        return self.element(0, 1)

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


Scalar = Union[int, Fraction]


@dataclass(frozen=True, eq=False)
class QuadElem:
    field: QuadField
    u: Fraction
    v: Fraction

    def __post_init__(self):
        object.__setattr__(self, "u", Fraction(self.u))
        object.__setattr__(self, "v", Fraction(self.v))

    def _coerce(self, other) -> "QuadElem":
        if isinstance(other, QuadElem):
            if other.field != self.field:
                raise PPFieldMismatch(f"{self.field} vs {other.field}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadElem(self.field, Fraction(other), Fraction(0))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.field, self.u + other.u, self.v + other.v)

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(self.field, -self.u, -self.v)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return QuadElem(self.field, self.u - other.u, self.v - other.v)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = self.field.d
        return QuadElem(
            self.field,
            self.u * other.u + d * self.v * other.v,
            self.u * other.v + self.v * other.u,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero in quadratic field")
        return QuadElem(self.field, self.u / n, -self.v / n)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result, base = QuadElem(self.field, Fraction(1), Fraction(0)), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, QuadElem):
            return self.field == other.field and self.u == other.u and self.v == other.v
        if isinstance(other, (int, Fraction)):
            return self.v == 0 and self.u == other
        return NotImplemented

    def __hash__(self):
        if self.v == 0:
            return hash(self.u)
        return hash((self.field.d, self.u, self.v))

    def conj(self) -> "QuadElem":
        return QuadElem(self.field, self.u, -self.v)

    def norm(self) -> Fraction:
        return self.u * self.u - self.field.d * self.v * self.v

    def trace(self) -> Fraction:
        return 2 * self.u

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def is_integral(self) -> bool:
        if self.field.half_integral:
            u2, v2 = 2 * self.u, 2 * self.v
            return (
                u2.denominator == 1
                and v2.denominator == 1
                and (u2.numerator - v2.numerator) % 2 == 0
            )
        return self.u.denominator == 1 and self.v.denominator == 1

    def minpoly(self) -> IntPoly:
        """Primitive integer minimal polynomial over Q."""
        if self.v == 0:
            return IntPoly((-self.u.numerator, self.u.denominator))
        t, n = self.trace(), self.norm()
        scale = math.lcm(t.denominator, n.denominator)
        return IntPoly((int(n * scale), int(-t * scale), scale)).primitive()

    def sqrt(self) -> Optional["QuadElem"]:
        """Exact square root inside the field, or None."""
        if self.v == 0:
            root = rat_sqrt(self.u)
            if root is not None:
                return QuadElem(self.field, root, Fraction(0))
            w = rat_sqrt(self.u / self.field.d)
            if w is not None:
                return QuadElem(self.field, Fraction(0), w)
            return None
        n = rat_sqrt(self.norm())
        if n is None:
            return None
        for sign in (1, -1):
            p = rat_sqrt((self.u + sign * n) / 2)
            if p:
                root = QuadElem(self.field, p, self.v / (2 * p))
                if root * root == self:
                    return root
        return None

    def embed(self, sign: int = 1, dps: int = MP_DPS):
        """Image under the embedding sqrt(D) -> sign * sqrt(D) (principal branch)."""
        with mpmath.workdps(dps):
            root = mpmath.sqrt(mpmath.mpf(self.field.d))
            u = mpmath.mpf(self.u.numerator) / self.u.denominator
            v = mpmath.mpf(self.v.numerator) / self.v.denominator
            return u + sign * v * root

    def __str__(self) -> str:
        if self.v == 0:
            return format_rat(self.u)
        v = format_rat(abs(self.v))
        op = "-" if self.v < 0 else "+"
        head = format_rat(self.u) if self.u else ""
        if not head and op == "+":
            op = ""
        return f"{head}{op}{v}*sqrt({self.field.d})"

    __repr__ = __str__


FieldValue = Union[Fraction, QuadElem]


def parse_quad(text: str, d: Optional[int] = None) -> FieldValue:
    """Parse "u+v*sqrt(D)"; a plain rational with d given is lifted into Q(sqrt(d))."""
    text = str(text).strip()
    match = QUAD_RE.match(text)
    if match is None:
        value = parse_rat(text)
        if d is None:
            return value
        return QuadField(d).element(value, 0)
    core = int(match.group("d"))
    if d is not None and d != core:
        raise PPFieldMismatch(f"element in Q(sqrt({core})) but field Q(sqrt({d}))")
    try:
        field = QuadField(core)
    except ValueError as exc:
        raise PPParseError(str(exc))
    u_text = match.group("u").strip()
    u = parse_rat(u_text) if u_text else Fraction(0)
    v = Fraction(match.group("v")) if match.group("v") else Fraction(1)
    if match.group("sign") == "-":
        v = -v
    return QuadElem(field, u, v)


def quad_arith(a: QuadElem, b: Optional[QuadElem], op: str) -> QuadElem:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    if op == "conj":
        return a.conj()
    raise ValueError(f"unknown operation {op}")


@dataclass(frozen=True)
class HeightEnclosure:
    """H(c) = M(minpoly)**(1/2) with M held exactly as r + s*sqrt(disc)."""

    minpoly: IntPoly
    r: Fraction
    s: Fraction
    disc: int

    def mahler(self):
        with iv_dps(MP_DPS) as iv:
            if self.s == 0:
                return iv_rat(self.r)
            return iv_rat(self.r) + iv_rat(self.s) * iv.sqrt(iv.mpf(self.disc))

    def interval(self):
        with iv_dps(MP_DPS) as iv:
            return iv.sqrt(self.mahler())

    @property
    def value(self) -> float:
        return float(mpmath.mpf(self.interval().mid))

    def at_most(self, bound: Union[int, Fraction]) -> bool:
        """Exact decision of H(c) <= bound."""
        target = Fraction(bound) ** 2
        if self.s == 0:
            return self.r <= target
        slack = target - self.r
        return slack >= 0 and self.s * self.s * self.disc <= slack * slack


def height_quadratic(minpoly: IntPoly) -> HeightEnclosure:
    if minpoly.degree != 2:
        raise PPInvalidPolynomial(f"degree {minpoly.degree} is not 2")
    if not minpoly.is_primitive():
        raise PPInvalidPolynomial(f"{minpoly} is not primitive")
    disc = minpoly.discriminant()
    if disc >= 0 and is_perfect_square(disc) is not None:
        raise PPInvalidPolynomial(f"{minpoly} is reducible")
    c, b, a = minpoly.coeffs
    if a < 0:
        a, b, c = -a, -b, -c
    b, c = abs(b), abs(c)
    if disc < 0:
        return HeightEnclosure(minpoly, Fraction(max(a, c)), Fraction(0), disc)
    if 2 * a - b >= 0 and disc <= (2 * a - b) ** 2:
        return HeightEnclosure(minpoly, Fraction(a), Fraction(0), disc)
    if 2 * c - b >= 0 and disc <= (2 * c - b) ** 2:
        return HeightEnclosure(minpoly, Fraction(c), Fraction(0), disc)
    return HeightEnclosure(minpoly, Fraction(b, 2), Fraction(1, 2), disc)


def height_at_most(c: FieldValue, bound: Union[int, Fraction]) -> bool:
    if isinstance(c, QuadElem):
        if c.v == 0:
            return height_rational(c.u) <= bound
        return height_quadratic(c.minpoly()).at_most(bound)
    return height_rational(c) <= bound


def iter_rationals(bound: int) -> Iterator[Fraction]:
    """Every rational of height at most bound, each once."""
    bound = int(bound)
    if bound < 1:
        return
    yield Fraction(0)
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)


def iter_quadratic_minpolys(bound: Union[int, Fraction]) -> Iterator[IntPoly]:
    """Primitive irreducible a*x^2 + b*x + c, a > 0, whose roots have H <= bound."""
    top = math.floor(Fraction(bound) ** 2)
    for a in range(1, top + 1):
        for c in range(-top, top + 1):
            if c == 0:
                continue
            for b in range(-2 * top, 2 * top + 1):
                if math.gcd(math.gcd(a, b), c) != 1:
                    continue
                disc = b * b - 4 * a * c
                if disc >= 0 and is_perfect_square(disc) is not None:
                    continue
                poly = IntPoly((c, b, a))
                if height_quadratic(poly).at_most(bound):
                    yield poly


def quadratic_roots(minpoly: IntPoly) -> Tuple["QuadElem", "QuadElem"]:
    """Both roots of an irreducible quadratic as elements of its splitting field."""
    c, b, a = minpoly.coeffs
    disc = b * b - 4 * a * c
    d = squarefree_part(disc)
    s = is_perfect_square(disc // d)
    fld = QuadField(d)
    root = fld.element(Fraction(-b, 2 * a), Fraction(s, 2 * a))
    return root, root.conj()
