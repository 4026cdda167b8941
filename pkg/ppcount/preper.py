import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from logging import NullHandler, getLogger
from typing import Dict, Iterable, List, Optional, Tuple

import mpmath
import sympy
from mpmath.libmp import NoConvergence

from ppcount.arith import (
    FieldValue,
    QuadElem,
    QuadField,
    is_perfect_square,
    rat_sqrt,
    squarefree_part,
)
from ppcount.defaults import (
    CLOSURE_PERIOD_CAP,
    LATTICE_MARGIN,
    QUAD_PERIOD_CAP,
    ROOT_DPS,
    ROOT_MATCH_TOL,
)
from ppcount.dynatomic import evaluate, specialize_dynatomic, univariate
from ppcount.exceptions import PPFieldMismatch
from ppcount.portraits import FunctionalGraph, PortraitLabel, classify

log = getLogger(__name__)
log.addHandler(NullHandler())

METHODS = ("lattice", "closure")


@dataclass(frozen=True)
class OrbitPoint:
    value: FieldValue
    preperiod: int
    period: int

    def to_json(self) -> dict:
        return {"value": str(self.value), "m": self.preperiod, "n": self.period}


@dataclass
class PreperSet:
    """Preperiodic points of z**2 + c together with their functional graph."""

    c: FieldValue
    points: List[OrbitPoint]
    graph: FunctionalGraph
    qfield: Optional[QuadField] = None
    method: str = "lattice"
    notes: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def values(self) -> List[FieldValue]:
        return [p.value for p in self.points]

    def check(self) -> bool:
        """Edges agree with exact evaluation of f_c."""
        values = self.values()
        for v, s in enumerate(self.graph.succ):
            if values[v] * values[v] + self.c != values[s]:
                return False
        return True

    def to_json(self, label: Optional[PortraitLabel] = None) -> dict:
        out = {
            "c": str(self.c),
            "field": self.qfield.d if self.qfield else None,
            "points": [p.to_json() for p in self.points],
            "edges": [[v, s] for v, s in enumerate(self.graph.succ)],
        }
        if label is not None:
            out["label"] = str(label)
        return out


def _sort_key(x: FieldValue) -> Tuple[Fraction, Fraction]:
    if isinstance(x, QuadElem):
        return x.u, x.v
    return Fraction(x), Fraction(0)


def _orbit_data(graph: FunctionalGraph) -> List[Tuple[int, int]]:
    """(preperiod, eventual period) per vertex."""
    data: Dict[int, Tuple[int, int]] = {}
    for cycle in graph.cycles():
        for v in cycle:
            data[v] = (0, len(cycle))
    for start in range(graph.n):
        path, v = [], start
        while v not in data:
            path.append(v)
            v = graph.succ[v]
        m, n = data[v]
        for u in reversed(path):
            m += 1
            data[u] = (m, n)
    return [data[v] for v in range(graph.n)]


def build_set(
    c: FieldValue,
    values: Iterable[FieldValue],
    fld: Optional[QuadField] = None,
    method: str = "lattice",
) -> PreperSet:
    """Assemble a PreperSet from a forward-closed collection of points."""
    values = sorted(set(values), key=_sort_key)
    index = {x: i for i, x in enumerate(values)}
    succ = []
    for x in values:
        image = x * x + c
        if image not in index:
            raise ValueError(f"{x} maps to {image} outside the point set")
        succ.append(index[image])
    graph = FunctionalGraph(len(values), tuple(succ), tuple(values))
    points = [OrbitPoint(x, m, n) for x, (m, n) in zip(values, _orbit_data(graph))]
    return PreperSet(c, points, graph, fld, method)


def _preperiodic_states(candidates: List, step) -> List:
    """Candidates whose orbit under step stays in the set and revisits a state."""
    index = {x: i for i, x in enumerate(candidates)}
    status: Dict[int, bool] = {}
    for start in range(len(candidates)):
        path, on_path, i = [], set(), start
        while True:
            if i is None:
                verdict = False
                break
            if i in status:
                verdict = status[i]
                break
            if i in on_path:
                verdict = True
                break
            path.append(i)
            on_path.add(i)
            i = index.get(step(candidates[i]))
        for j in path:
            status[j] = verdict
    return [x for i, x in enumerate(candidates) if status[i]]


def _escape_bound_int(delta: int, a: int) -> int:
    """Largest e with |e/delta| <= 1/2 + sqrt(1/4 + |a|/delta**2)."""
    return (delta + math.isqrt(delta * delta + 4 * abs(a))) // 2


def _lattice_Q(c: Fraction) -> List[Fraction]:
    delta = is_perfect_square(c.denominator)
    if delta is None:
        return []
    a = c.numerator
    bound = _escape_bound_int(delta, a)
    log.debug(f"lattice over Q for c={c}: |e| <= {bound}, delta={delta}")

    def step(e: int):
        num = e * e + a
        if num % delta:
            return None
        return num // delta

    found = _preperiodic_states(list(range(-bound, bound + 1)), step)
    return [Fraction(e, delta) for e in found]


def _real_roots(coeffs: List[Fraction]) -> List:
    """Real roots of a rational polynomial (ascending coefficients)."""
    with mpmath.workdps(ROOT_DPS):
        mp = [mpmath.mpf(a.numerator) / a.denominator for a in reversed(coeffs)]
        roots = mpmath.polyroots(mp, maxsteps=200, extraprec=2 * ROOT_DPS)
        return [r.real for r in roots if abs(mpmath.im(r)) < ROOT_MATCH_TOL]


def _rational_periodic(c: Fraction, N: int, delta: int) -> List[Fraction]:
    if N == 1:
        r = rat_sqrt(1 - 4 * c)
        return [] if r is None else [(1 + r) / 2, (1 - r) / 2]
    if N == 2:
        r = rat_sqrt(-3 - 4 * c)
        return [] if r is None else [(-1 + r) / 2, (-1 - r) / 2]
    coeffs = specialize_dynatomic(N, c)
    out = []
    for root in _real_roots(coeffs):
        x = Fraction(int(mpmath.nint(root * delta)), delta)
        if evaluate(coeffs, x) == 0:
            out.append(x)
    return out


def _backward_closure(c, periodic: Iterable, sqrt) -> set:
    points = set(periodic)
    frontier = list(points)
    while frontier:
        y = frontier.pop()
        root = sqrt(y - c)
        if root is None:
            continue
        for z in (root, -root):
            if z not in points:
                points.add(z)
                frontier.append(z)
    return points


def _closure_Q(c: Fraction, period_cap: int) -> List[Fraction]:
    delta = is_perfect_square(c.denominator)
    if delta is None:
        return []
    periodic = []
    for N in range(1, period_cap + 1):
        periodic.extend(_rational_periodic(c, N, delta))
    return list(_backward_closure(c, periodic, rat_sqrt))


def preper_points_Q(
    c: Fraction, method: str = "lattice", period_cap: int = CLOSURE_PERIOD_CAP
) -> PreperSet:
    c = Fraction(c)
    if method == "closure":
        try:
            return build_set(c, _closure_Q(c, period_cap), method="closure")
        except NoConvergence:
            log.debug(f"root finding failed for c={c}, using lattice")
    elif method != "lattice":
        raise ValueError(f"unknown method {method}")
    return build_set(c, _lattice_Q(c))


def portrait_Q(
    c: Fraction, method: str = "lattice"
) -> Tuple[FunctionalGraph, PortraitLabel]:
    points = preper_points_Q(c, method)
    return points.graph, classify(points.graph)


def denominator_scale(c: QuadElem) -> int:
    """delta with delta * x integral for every preperiodic x."""
    m0 = math.lcm(c.u.denominator, c.v.denominator)
    m = next(d for d in sympy.divisors(m0) if (c * d).is_integral())
    delta = 1
    for p, e in sympy.factorint(m).items():
        delta *= p ** ((e + 1) // 2)
    return delta


def _embeddings(fld: QuadField) -> Tuple[int, ...]:
    return (1, -1) if fld.is_real else (1,)


def _lattice_candidates(c: QuadElem, delta: int) -> List[QuadElem]:
    fld = c.field
    radii = []
    for sign in _embeddings(fld):
        size = float(abs(c.embed(sign)))
        radii.append(delta * (0.5 + math.sqrt(0.25 + size)) + LATTICE_MARGIN)
    half = fld.half_integral
    root = math.sqrt(abs(fld.d))
    # y = s + t*w with w = sqrt(D) or (1 + sqrt(D))/2; a, b are its sqrt(D) coordinates
    scale = 2 if half else 1
    out = []
    if fld.is_real:
        y_plus, y_minus = radii
        t_max = math.floor(scale * (y_plus + y_minus) / (2 * root)) + 1
        for t in range(-t_max, t_max + 1):
            b = Fraction(t, scale)
            bs = float(b) * root
            lo = max(-y_plus - bs, -y_minus + bs)
            hi = min(y_plus - bs, y_minus + bs)
            offset = Fraction(t, 2) if half else Fraction(0)
            for s in range(math.ceil(lo - offset) - 1, math.floor(hi - offset) + 2):
                out.append(fld.element(Fraction(s) + offset, b) / delta)
    else:
        (radius,) = radii
        t_max = math.floor(scale * radius / root) + 1
        for t in range(-t_max, t_max + 1):
            b = Fraction(t, scale)
            rest = radius * radius - abs(fld.d) * float(b) ** 2
            if rest < 0:
                continue
            width = math.sqrt(rest)
            offset = Fraction(t, 2) if half else Fraction(0)
            lo, hi = math.ceil(-width - offset) - 1, math.floor(width - offset) + 2
            for s in range(lo, hi):
                out.append(fld.element(Fraction(s) + offset, b) / delta)
    return out


def _lattice_quad(c: QuadElem) -> List[QuadElem]:
    delta = denominator_scale(c)
    candidates = _lattice_candidates(c, delta)
    log.debug(
        f"lattice over {c.field} for c={c}: {len(candidates)} candidates, delta={delta}"
    )
    return _preperiodic_states(candidates, lambda x: x * x + c)


def _embed_poly(coeffs: List[FieldValue], fld: QuadField, sign: int) -> List:
    out = []
    for a in reversed(coeffs):
        if isinstance(a, QuadElem):
            out.append(a.embed(sign, ROOT_DPS))
        else:
            out.append(mpmath.mpf(a.numerator) / a.denominator)
    return out


def _reconstruct(u, v, fld: QuadField, scale: int) -> QuadElem:
    return fld.element(
        Fraction(int(mpmath.nint(u * scale)), scale),
        Fraction(int(mpmath.nint(v * scale)), scale),
    )


def _quad_periodic(c: QuadElem, N: int, delta: int) -> List[QuadElem]:
    fld = c.field
    if N in (1, 2):
        disc = 1 - 4 * c if N == 1 else -3 - 4 * c
        r = disc.sqrt()
        if r is None:
            return []
        base = 1 if N == 1 else -1
        return [(base + r) / 2, (base - r) / 2]
    coeffs = specialize_dynatomic(N, c)
    scale = 2 * delta
    out = []
    with mpmath.workdps(ROOT_DPS):
        root_d = mpmath.sqrt(abs(fld.d))
        if fld.is_real:
            plus = mpmath.polyroots(_embed_poly(coeffs, fld, 1), maxsteps=200)
            minus = mpmath.polyroots(_embed_poly(coeffs, fld, -1), maxsteps=200)
            plus = [r.real for r in plus if abs(mpmath.im(r)) < ROOT_MATCH_TOL]
            minus = [r.real for r in minus if abs(mpmath.im(r)) < ROOT_MATCH_TOL]
            pairs = [
                ((r1 + r2) / 2, (r1 - r2) / (2 * root_d))
                for r1 in plus
                for r2 in minus
            ]
        else:
            roots = mpmath.polyroots(_embed_poly(coeffs, fld, 1), maxsteps=200)
            pairs = [(mpmath.re(r), mpmath.im(r) / root_d) for r in roots]
        for u, v in pairs:
            x = _reconstruct(u, v, fld, scale)
            if evaluate(coeffs, x) == 0:
                out.append(x)
    return out


def _closure_quad(c: QuadElem, period_cap: int) -> List[QuadElem]:
    delta = denominator_scale(c)
    periodic = []
    for N in range(1, period_cap + 1):
        periodic.extend(_quad_periodic(c, N, delta))
    return list(_backward_closure(c, periodic, lambda x: x.sqrt()))


def _as_field_element(c: FieldValue, fld: Optional[QuadField]) -> QuadElem:
    if isinstance(c, QuadElem):
        if fld is not None and c.field != fld:
            raise PPFieldMismatch(f"c in {c.field}, requested {fld}")
        return c
    if fld is None:
        raise ValueError("a rational c needs an explicit field")
    return fld.element(Fraction(c), 0)


def preper_points_quad(
    c: FieldValue,
    fld: Optional[QuadField] = None,
    method: str = "lattice",
    period_cap: int = CLOSURE_PERIOD_CAP,
) -> PreperSet:
    c = _as_field_element(c, fld)
    if method == "closure":
        try:
            return build_set(c, _closure_quad(c, period_cap), c.field, "closure")
        except NoConvergence:
            log.debug(f"root finding failed for c={c}, using lattice")
    elif method != "lattice":
        raise ValueError(f"unknown method {method}")
    return build_set(c, _lattice_quad(c), c.field)


def portrait_quad(
    c: FieldValue, fld: Optional[QuadField] = None, method: str = "lattice"
) -> Tuple[FunctionalGraph, PortraitLabel]:
    points = preper_points_quad(c, fld, method)
    return points.graph, classify(points.graph)


def _field_of(value: Fraction) -> int:
    return squarefree_part(value.numerator * value.denominator)


def _cycle_field_discs(c: Fraction, periods: Iterable[int]) -> set:
    """Fields of the quadratic factors of Phi_N(c, z) for N in periods."""
    discs = set()
    for N in periods:
        poly = univariate(specialize_dynatomic(N, c))
        for factor, _ in poly.factor_list()[1]:
            if factor.degree() != 2:
                continue
            a2, a1, a0 = (Fraction(int(q.p), int(q.q)) for q in factor.all_coeffs())
            discs.add(_field_of(a1 * a1 - 4 * a2 * a0))
    return discs


def candidate_fields(c: Fraction, period_cap: int = QUAD_PERIOD_CAP) -> List[int]:
    """Squarefree D such that Q(sqrt(D)) may hold non-rational preperiodic points.

    A non-rational preperiodic point either has a rational point as the first
    rational element of its orbit, so it is a square root of y - c for a rational
    preperiodic y, or lies on a cycle of irrational points and so is a root of a
    quadratic factor of the specialized dynatomic polynomial.
    """
    c = Fraction(c)
    discs = set()
    for y in preper_points_Q(c).values():
        s = y - c
        if s != 0 and rat_sqrt(s) is None:
            discs.add(_field_of(s))
    discs |= _cycle_field_discs(c, range(1, period_cap + 1))
    return sorted(discs)


@lru_cache(maxsize=4096)
def skipped_fields(c: Fraction, period_cap: int) -> List[int]:
    """Fields with quadratic cycles longer than period_cap and at most
    QUAD_PERIOD_CAP that a search capped at period_cap never visits."""
    if period_cap >= QUAD_PERIOD_CAP:
        return []
    c = Fraction(c)
    longer = _cycle_field_discs(c, range(period_cap + 1, QUAD_PERIOD_CAP + 1))
    return sorted(longer - set(candidate_fields(c, period_cap)))


def quad_fields_with_new_points(
    c: Fraction, period_cap: int = QUAD_PERIOD_CAP, method: str = "lattice"
) -> List[Tuple[QuadField, PreperSet]]:
    c = Fraction(c)
    base = len(preper_points_Q(c))
    skipped = skipped_fields(c, period_cap)
    if skipped:
        log.warning(
            f"c={c}: fields {skipped} carry cycles longer than {period_cap}, skipped"
        )
    out = []
    for d in candidate_fields(c, period_cap):
        fld = QuadField(d)
        points = preper_points_quad(c, fld, method)
        if len(points) > base:
            if skipped:
                points.notes.append(f"fields {skipped} skipped by period cap")
            out.append((fld, points))
    log.debug(f"c={c}: {len(out)} quadratic fields with new points")
    return out
