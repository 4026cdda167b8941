import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from itertools import islice, product
from logging import NullHandler, getLogger
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import sympy
from sympy.polys.polyfuncs import symmetrize

from ppcount.arith import (
    FieldValue,
    IntPoly,
    QuadElem,
    QuadField,
    height_rational,
    is_perfect_square,
    iter_quadratic_minpolys,
    iter_rationals,
    quadratic_roots,
    rat_sqrt,
    squarefree_part,
)
from ppcount.defaults import (
    BOX_SAFETY,
    DEFAULT_RANKS,
    SYM2_PRIME_LIMIT,
    TORSION_HEIGHTS,
    UNIT_CIRCLE_SAMPLES,
)
from ppcount.exceptions import (
    PPAutIdentityFailed,
    PPCatalogChecksum,
    PPNonCoprimeForms,
    PPSym2ConventionNotFound,
    PPUnknownLabel,
    PPUnsupported,
)
from ppcount.maps import GAMMA_MAP, SIBLING_MAP
from ppcount.portraits import FunctionalGraph, ab_candidates, canonical_code
from ppcount.preper import preper_points_quad
from ppcount.utils import sha256_file

log = getLogger(__name__)
log.addHandler(NullHandler())

X, Y = sympy.symbols("x y")
X0, X1, X2 = sympy.symbols("x0 x1 x2")
CATALOG_FILE = "curves.json"


@dataclass(frozen=True)
class HomPair:
    """Binary forms G_i(a, b) = sum g_i[j] a**j b**(k - j) of common degree k."""

    g0: IntPoly
    g1: IntPoly
    k: int

    def __post_init__(self):
        if max(self.g0.degree, self.g1.degree) > self.k:
            raise ValueError(f"form degree exceeds {self.k}")

    def __call__(self, a, b) -> Tuple:
        return self.g0.homogeneous(a, b, self.k), self.g1.homogeneous(a, b, self.k)

    def coefficients(self, which: int) -> List[int]:
        """Ascending coefficient list padded to length k + 1."""
        coeffs = list((self.g0, self.g1)[which].coeffs)
        return coeffs + [0] * (self.k + 1 - len(coeffs))

    @property
    def resultant(self) -> int:
        k = self.k
        rows = []
        for which in (0, 1):
            desc = list(reversed(self.coefficients(which)))
            for shift in range(k):
                rows.append([0] * shift + desc + [0] * (k - 1 - shift))
        return int(sympy.Matrix(rows).det())

    def is_coprime(self) -> bool:
        return self.resultant != 0


@dataclass(frozen=True)
class HomTriple:
    """Ternary forms (H0, H1, H2) of a common degree in x0, x1, x2."""

    forms: Tuple[sympy.Poly, sympy.Poly, sympy.Poly]

    @classmethod
    def from_exprs(cls, exprs) -> "HomTriple":
        return cls(tuple(sympy.Poly(e, X0, X1, X2, domain="ZZ") for e in exprs))

    @property
    def degree(self) -> int:
        return self.forms[0].total_degree()

    def __call__(self, x0, x1, x2) -> Tuple:
        out = []
        for form in self.forms:
            acc = 0
            for (i, j, l), a in form.terms():
                acc += int(a) * x0**i * x1**j * x2**l
            out.append(acc)
        return tuple(out)

    def monomials(self, which: int) -> List[Tuple[Tuple[int, int, int], int]]:
        return [(m, int(a)) for m, a in self.forms[which].terms()]

    def __eq__(self, other) -> bool:
        if not isinstance(other, HomTriple):
            return NotImplemented
        return all(a == b for a, b in zip(self.forms, other.forms))

    def __hash__(self):
        return hash(tuple(str(f.as_expr()) for f in self.forms))


@dataclass(frozen=True)
class RationalMap1D:
    g0: IntPoly
    g1: IntPoly

    @property
    def k(self) -> int:
        return max(self.g0.degree, self.g1.degree)

    def __call__(self, x: Optional[FieldValue]) -> Optional[FieldValue]:
        """pi(x); None stands for the point at infinity."""
        if x is None:
            top0, top1 = self.homogenize()(1, 0)
            return Fraction(top0, top1) if top1 else None
        if isinstance(x, int):
            x = Fraction(x)
        den = self.g1(x)
        if den == 0:
            return None
        return self.g0(x) / den

    def homogenize(self) -> HomPair:
        return HomPair(self.g0, self.g1, self.k)

    def as_expr(self, var=X):
        g0 = sum(a * var**i for i, a in enumerate(self.g0.coeffs))
        g1 = sum(a * var**i for i, a in enumerate(self.g1.coeffs))
        return g0 / g1


@dataclass(frozen=True)
class AutMap:
    x: str
    y: Optional[str] = None

    @property
    def x_expr(self):
        return sympy.sympify(self.x, locals={"x": X, "y": Y})

    @property
    def y_expr(self):
        return sympy.sympify(self.y, locals={"x": X, "y": Y}) if self.y else Y

    def __call__(self, x: FieldValue, y: Optional[FieldValue] = None):
        env = {X: x, Y: y}
        new_x = evaluate_expr(self.x_expr, env)
        if self.y is None:
            return new_x, y
        return new_x, evaluate_expr(self.y_expr, env)


@dataclass(frozen=True)
class CurveRecord:
    label: str
    genus: int
    pi: RationalMap1D
    aut_order: int
    aut: Tuple[AutMap, ...]
    h: Optional[IntPoly] = None
    tag: str = ""

    @property
    def curve_degree(self) -> int:
        """Degree of pi on the curve: x-map degree, doubled on a double cover."""
        return self.pi.k if self.genus == 0 else 2 * self.pi.k

    @property
    def gamma(self) -> int:
        return GAMMA_MAP[self.label]

    @classmethod
    def from_json(cls, raw: dict) -> "CurveRecord":
        return cls(
            label=raw["label"],
            genus=int(raw["genus"]),
            pi=RationalMap1D(IntPoly(tuple(raw["g0"])), IntPoly(tuple(raw["g1"]))),
            aut_order=int(raw["aut_order"]),
            aut=tuple(AutMap(a["x"], a.get("y")) for a in raw["aut"]),
            h=IntPoly(tuple(raw["h"])) if "h" in raw else None,
            tag=raw.get("tag", ""),
        )


def evaluate_expr(expr, env: dict):
    """Exact evaluation of a sympy rational expression on Fraction or QuadElem."""
    if expr.is_Symbol:
        return env[expr]
    if expr.is_Integer:
        return Fraction(int(expr))
    if expr.is_Rational:
        return Fraction(int(expr.p), int(expr.q))
    if expr.is_Add:
        acc = Fraction(0)
        for arg in expr.args:
            acc = acc + evaluate_expr(arg, env)
        return acc
    if expr.is_Mul:
        acc = Fraction(1)
        for arg in expr.args:
            acc = acc * evaluate_expr(arg, env)
        return acc
    if expr.is_Pow and expr.exp.is_Integer:
        base = evaluate_expr(expr.base, env)
        n = int(expr.exp)
        if n < 0:
            return 1 / base ** (-n)
        return base**n
    raise ValueError(f"cannot evaluate {expr} exactly")


@lru_cache(maxsize=None)
def load_catalog() -> Dict[str, CurveRecord]:
    data = resources.files("ppcount") / "data"
    path = data / CATALOG_FILE
    expected = (data / f"{CATALOG_FILE}.sha256").read_text().strip()
    actual = sha256_file(path)
    if actual != expected:
        raise PPCatalogChecksum(f"{CATALOG_FILE}: {actual} != {expected}")
    raw = json.loads(path.read_text(encoding="utf-8"))
    records = {r["label"]: CurveRecord.from_json(r) for r in raw["records"]}
    log.debug(f"loaded {len(records)} curve records")
    return records


def get_record(label: str) -> CurveRecord:
    try:
        return load_catalog()[label]
    except KeyError:
        raise PPUnknownLabel(label)


def eval_pi(label: str, x: Optional[FieldValue]) -> Optional[FieldValue]:
    return get_record(label).pi(x)


def solve_fiber(label: str, c: Fraction, include_infinity: bool = False) -> List:
    """Rational x with pi(x) = c."""
    record = get_record(label)
    if record.genus != 0:
        raise PPUnsupported(f"{label} is not a genus-0 label")
    c = Fraction(c)
    g0, g1 = record.pi.g0, record.pi.g1
    n = max(g0.degree, g1.degree) + 1
    a = list(g0.coeffs) + [0] * (n - len(g0.coeffs))
    b = list(g1.coeffs) + [0] * (n - len(g1.coeffs))
    coeffs = [c.denominator * p - c.numerator * q for p, q in zip(a, b)]
    roots = []
    if any(coeffs):
        poly = IntPoly(tuple(coeffs)).to_sympy(X)
        for factor, _ in poly.factor_list()[1]:
            if factor.degree() == 1:
                lead, const = (int(t) for t in factor.all_coeffs())
                x = Fraction(-const, lead)
                if g1(x) != 0:
                    roots.append(x)
    if include_infinity and record.pi(None) == c:
        roots.append(None)
    return sorted(roots, key=lambda r: (r is None, r or 0))


@dataclass
class AutReport:
    label: str
    order: int
    expected_order: int
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.order == self.expected_order

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "ok": self.ok,
            "order": self.order,
            "expected_order": self.expected_order,
            "failures": self.failures,
        }


def _vanishes_on_curve(expr, record: CurveRecord) -> bool:
    num = sympy.numer(sympy.together(expr))
    if record.h is None:
        return sympy.expand(num) == 0
    relation = Y**2 - sum(a * X**i for i, a in enumerate(record.h.coeffs))
    return sympy.expand(sympy.rem(sympy.expand(num), relation, Y)) == 0


def _sample_points(record: CurveRecord, count: int = 3) -> List[Tuple]:
    """Non-degenerate points over quadratic fields (or Q for genus 0)."""
    out = []
    by_height = sorted(iter_rationals(7), key=lambda r: (height_rational(r), r))
    for x in by_height:
        if x in (0, 1, -1) or record.pi.g1(x) == 0:
            continue
        if record.h is None:
            out.append((x, None))
        else:
            hx = record.h(x)
            if hx == 0 or rat_sqrt(hx) is not None:
                continue
            fld = QuadField(squarefree_part(hx.numerator * hx.denominator))
            root = rat_sqrt(hx / fld.d)
            out.append((fld.element(x, 0), fld.element(0, root)))
        if len(out) == count:
            break
    return out


def verify_aut(label: str, strict: bool = False) -> AutReport:
    record = get_record(label)
    report = AutReport(label, len(record.aut), record.aut_order)
    pi_expr = record.pi.as_expr()
    for i, sigma in enumerate(record.aut):
        moved = pi_expr.subs({X: sigma.x_expr}, simultaneous=True)
        if not _vanishes_on_curve(moved - pi_expr, record):
            report.failures.append(f"{label} aut[{i}]: pi o sigma != pi")
        if record.h is not None:
            h_expr = sum(a * X**j for j, a in enumerate(record.h.coeffs))
            on_curve = sigma.y_expr**2 - h_expr.subs({X: sigma.x_expr})
            if not _vanishes_on_curve(on_curve, record):
                report.failures.append(f"{label} aut[{i}]: image leaves the curve")
    points = _sample_points(record)
    images = []
    for x, y in points:
        try:
            images.append([sigma(x, y) for sigma in record.aut])
        except ZeroDivisionError:
            images.append(None)
    usable = [(p, im) for p, im in zip(points, images) if im is not None]
    if not any(all(im[i] == p for p, im in usable) for i in range(len(record.aut))):
        report.failures.append(f"{label}: identity missing")
    for i, sigma in enumerate(record.aut):
        for j in range(len(record.aut)):
            matches = set(range(len(record.aut)))
            for p, im in usable:
                try:
                    composed = sigma(*im[j])
                except ZeroDivisionError:
                    continue
                matches &= {r for r, value in enumerate(im) if value == composed}
            if not matches:
                report.failures.append(f"{label}: aut[{i}] o aut[{j}] not in the list")
    log.debug(f"verify_aut {label}: {len(report.failures)} failures")
    if strict and not report.ok:
        raise PPAutIdentityFailed("; ".join(report.failures) or label)
    return report


# transcription of the symmetric-square map of the 8(2,1,1) forgetful map
SYM2_8211_EXPRS = (
    16 * X0**4 - 32 * X0**2 * X1**2 + 16 * X1**4 + 64 * X0**3 * X2
    - 64 * X0 * X1**2 * X2 + 96 * X0**2 * X2**2 - 32 * X1**2 * X2**2
    + 64 * X0 * X2**3 + 16 * X2**4,
    24 * X0**4 + 16 * X0**2 * X1**2 + 24 * X1**4 - 32 * X0**3 * X2
    - 96 * X0 * X1**2 * X2 - 112 * X0**2 * X2**2 + 16 * X1**2 * X2**2
    - 32 * X0 * X2**3 + 24 * X2**4,
    9 * X0**4 + 30 * X0**2 * X1**2 + 9 * X1**4 - 60 * X0**3 * X2
    - 36 * X0 * X1**2 * X2 + 118 * X0**2 * X2**2 + 30 * X1**2 * X2**2
    - 60 * X0 * X2**3 + 9 * X2**4,
)

# (reverse order, sign of the middle form) applied to [G0G0, G0G1 + G1G0, G1G1]
SYM2_CONVENTIONS = [(False, 1), (False, -1), (True, 1), (True, -1)]
SYM2_PINNED = (True, -1)


def _apply_convention(triple, convention) -> tuple:
    reverse, sign = convention
    first, middle, last = triple
    middle = sign * middle
    return (last, middle, first) if reverse else (first, middle, last)


def sym2_map_8211() -> HomTriple:
    return HomTriple.from_exprs(SYM2_8211_EXPRS)


def sym2_halves_at_2(span: int = 6) -> bool:
    """Every y = (1,1,0) mod 2 in [-span, span]^3 has all H_i(y) divisible by 16."""
    triple = sym2_map_8211()
    odd = range(-span + (span + 1) % 2, span + 1, 2)
    even = range(-span + span % 2, span + 1, 2)
    for y in product(odd, odd, even):
        if any(value % 16 for value in triple(*y)):
            log.debug(f"H{y} = {triple(*y)} not divisible by 16")
            return False
    return True


def sym2_forms(pair: HomPair, convention: Tuple[bool, int] = SYM2_PINNED) -> HomTriple:
    """Forms H with H(eps(P, Q)) = eps(G(P), G(Q)) for eps the Sym^2 embedding."""
    a1, a2 = sympy.symbols("a1 a2")
    s1, s2 = sympy.symbols("s1 s2")

    def g(which, var):
        return sum(c * var**i for i, c in enumerate(pair.coefficients(which)))

    products = (
        g(0, a1) * g(0, a2),
        g(0, a1) * g(1, a2) + g(1, a1) * g(0, a2),
        g(1, a1) * g(1, a2),
    )
    forms = []
    for expr in products:
        sym, rem, defs = symmetrize(sympy.expand(expr), a1, a2, formal=True)
        if rem != 0:
            raise ValueError("product is not symmetric")
        sym = sym.subs({defs[0][0]: s1, defs[1][0]: s2})
        poly = sympy.Poly(sym, s1, s2)
        form = 0
        for (p, q), coeff in poly.terms():
            form += coeff * X1**p * X0**q * X2 ** (pair.k - p - q)
        forms.append(form)
    return HomTriple.from_exprs(_apply_convention(forms, convention))


def _eps(p, q) -> Tuple:
    (a1, b1), (a2, b2) = p, q
    return a1 * a2, a1 * b2 + a2 * b1, b1 * b2


def _proportional(u, v) -> bool:
    if not any(u) or not any(v):
        return False
    return all(u[i] * v[j] == u[j] * v[i] for i in range(3) for j in range(i + 1, 3))


@dataclass
class Sym2Report:
    convention: Optional[Tuple[bool, int]]
    samples: int
    matched: Dict[Tuple[bool, int], int]
    transcription_ok: bool

    @property
    def ok(self) -> bool:
        return self.convention is not None and self.transcription_ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "convention": list(self.convention) if self.convention else None,
            "samples": self.samples,
            "matched": {f"{r}:{s}": n for (r, s), n in self.matched.items()},
            "transcription_ok": self.transcription_ok,
        }


def verify_sym2(samples: int = 100, seed: int = 0) -> Sym2Report:
    pair = get_record("8(2,1,1)").pi.homogenize()
    transcribed = sym2_map_8211()
    rng = random.Random(seed)
    matched = {conv: 0 for conv in SYM2_CONVENTIONS}
    used = 0
    while used < samples:
        pts = []
        for _ in range(2):
            a = rng.randint(-SYM2_PRIME_LIMIT, SYM2_PRIME_LIMIT)
            b = rng.randint(1, SYM2_PRIME_LIMIT)
            pts.append((a, b))
        images = [pair(a, b) for a, b in pts]
        if any(g1 == 0 for _, g1 in images):
            continue
        used += 1
        lhs = transcribed(*_eps(*pts))
        rhs = _eps(*images)
        for conv in SYM2_CONVENTIONS:
            if _proportional(lhs, _apply_convention(rhs, conv)):
                matched[conv] += 1
    winners = [conv for conv in SYM2_CONVENTIONS if matched[conv] == used]
    if not winners:
        raise PPSym2ConventionNotFound(f"sample matches {matched}")
    convention = winners[0]
    transcription_ok = sym2_forms(pair, convention) == transcribed
    if not transcription_ok:
        log.warning("generated Sym2 forms differ from the transcription")
    return Sym2Report(convention, used, matched, transcription_ok)


@dataclass(frozen=True)
class CurvePoint:
    """Rational point on y^2 = h(x); x None marks a point at infinity."""

    x: Optional[Fraction]
    y: Fraction


def rational_points(record: CurveRecord, hbound: int) -> List[CurvePoint]:
    if record.h is None:
        raise PPUnsupported(f"{record.label} has no hyperelliptic model")
    h = record.h
    even = h.degree + (h.degree % 2)
    points = []
    for q in range(1, hbound + 1):
        for p in range(-hbound, hbound + 1):
            if math.gcd(p, q) != 1:
                continue
            value = h.homogeneous(p, q, even)
            if value < 0:
                continue
            root = is_perfect_square(value)
            if root is None:
                continue
            x, y = Fraction(p, q), Fraction(root, q ** (even // 2))
            points.append(CurvePoint(x, y))
            if y:
                points.append(CurvePoint(x, -y))
    if h.degree % 2:
        points.append(CurvePoint(None, Fraction(0)))
    else:
        lead = rat_sqrt(Fraction(h.lead))
        if lead is not None:
            points.extend([CurvePoint(None, lead), CurvePoint(None, -lead)])
    return points


def torsion(record: CurveRecord, heights: Tuple[int, ...] = TORSION_HEIGHTS) -> int:
    """Size of E(Q) for a rank-0 curve, read off a stabilized point count."""
    rank = DEFAULT_RANKS.get(record.label)
    if rank != 0:
        raise PPUnsupported(f"{record.label}: declared rank {rank}, need 0")
    counts = [len(rational_points(record, h)) for h in heights]
    if len(set(counts)) != 1:
        raise PPUnsupported(f"{record.label}: point counts {counts} did not stabilize")
    log.warning(
        f"{record.label}: stabilized count {counts[0]} taken as the torsion order"
    )
    return counts[0]


def generate_c_degree1(
    label: str, hbound: int
) -> Iterator[Tuple[Optional[Fraction], Fraction]]:
    """(x, c) pairs; x None stands for the point at infinity."""
    record = get_record(label)
    if record.genus == 0:
        xs = list(iter_rationals(hbound)) + [None]
    else:
        xs = [pt.x for pt in rational_points(record, hbound)]
    for x in xs:
        c = record.pi(x)
        if c is not None:
            yield x, c


def generate_cK_degree2(
    label: str, hbound
) -> Iterator[Tuple[FieldValue, QuadField]]:
    record = get_record(label)
    if record.genus == 0:
        for minpoly in iter_quadratic_minpolys(hbound):
            for x in quadratic_roots(minpoly):
                c = record.pi(x)
                if c is None:
                    continue
                if isinstance(c, QuadElem) and c.is_rational:
                    c = c.u
                yield c, x.field
        return
    for x in iter_rationals(hbound):
        hx = record.h(x)
        if hx == 0 or rat_sqrt(hx) is not None:
            continue
        c = record.pi(x)
        if c is None:
            continue
        yield c, QuadField(squarefree_part(hx.numerator * hx.denominator))


def bad_primes(pair: HomPair) -> List[int]:
    res = pair.resultant
    if res == 0:
        raise PPNonCoprimeForms(f"forms {pair.g0} and {pair.g1} share a factor")
    return sorted(sympy.factorint(abs(res)))


def archimedean_floor(
    pair: HomPair, samples: int = UNIT_CIRCLE_SAMPLES, complex_points: bool = False
) -> float:
    """
    Sampled minimum of max(|G0|, |G1|) over max(|a|, |b|) = 1.

    The real floor walks the boundary of the unit square. complex_points walks the
    boundary of the unit bidisc instead, needed once x ranges over imaginary
    quadratic fields; a common unit phase leaves both moduli unchanged, so one
    coordinate is pinned to 1 and the other covers the closed unit disc.
    """
    g0 = np.array(pair.coefficients(0), dtype=float)
    g1 = np.array(pair.coefficients(1), dtype=float)
    if complex_points:
        side = max(2 * math.isqrt(samples), 2)
        radius = np.linspace(0.0, 1.0, side)
        angle = np.linspace(0.0, 2 * math.pi, side, endpoint=False)
        t = np.outer(radius, np.exp(1j * angle)).ravel()
    else:
        t = np.linspace(-1.0, 1.0, samples)
    ones = np.ones_like(t)
    charts = [(t, ones), (ones, t)]
    best = math.inf
    if complex_points:
        best = archimedean_floor(pair, samples)
    else:
        charts += [(t, -ones), (-ones, t)]
    for a, b in charts:
        powers = np.array([a**j * b ** (pair.k - j) for j in range(pair.k + 1)])
        value = np.maximum(np.abs(g0 @ powers), np.abs(g1 @ powers))
        best = min(best, float(value.min()))
    return best


def height_lower_bound(pair: HomPair, complex_points: bool = False) -> float:
    """kappa with H(pi(x)) >= kappa * H(x)**k; complex_points covers quadratic x."""
    from ppcount.constants.padic import max_common_valuation

    kappa = float(BOX_SAFETY) * archimedean_floor(pair, complex_points=complex_points)
    for p in bad_primes(pair):
        kappa /= p ** max_common_valuation(pair, p)
    return kappa


def _exemplar(label: str, attempts: int) -> Optional[FunctionalGraph]:
    record = get_record(label)
    if record.genus != 1:
        raise ValueError(f"{label} is not a genus-1 row")
    size = int(label.split("(")[0])
    shapes = {canonical_code(g): g for g in ab_candidates(label)}
    for c, fld in islice(generate_cK_degree2(label, 5), attempts):
        graph = preper_points_quad(c, fld).graph
        code = canonical_code(graph)
        if graph.n == size and code in shapes:
            log.debug(f"{label} pinned by c={c} over {fld}")
            return shapes[code]
    log.warning(f"no exemplar for {label} within {attempts} points")
    return None


def exemplar_graphs(attempts: int = 40) -> Dict[str, FunctionalGraph]:
    """Portrait graphs of a/b labels computed from points of their covering curves."""
    pinned = {}
    for label in sorted(SIBLING_MAP):
        graph = _exemplar(label, attempts)
        if graph is not None:
            pinned[label] = graph
    for label, sibling in SIBLING_MAP.items():
        if label in pinned and sibling in pinned:
            if canonical_code(pinned[label]) == canonical_code(pinned[sibling]):
                raise ValueError(f"{label} and {sibling} pinned to the same shape")
    return pinned
