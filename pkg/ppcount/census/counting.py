import math
from dataclasses import dataclass, field
from fractions import Fraction
from logging import NullHandler, getLogger
from typing import Iterator, List, Optional, Tuple

import numpy as np

from ppcount.curves import HomPair, get_record, height_lower_bound, solve_fiber
from ppcount.defaults import X_BOUND_SAFETY
from ppcount.preper import portrait_Q

log = getLogger(__name__)
log.addHandler(NullHandler())

INT64_HEADROOM = 2**62


@dataclass(frozen=True)
class ImageRow:
    """Reduced images num/den of the primitive pairs (a, b) for one b."""

    b: int
    a: np.ndarray
    num: np.ndarray
    den: np.ndarray

    def fractions(self) -> Iterator[Tuple[Fraction, Fraction]]:
        """(x, c) pairs, skipping points sent to infinity."""
        for a, num, den in zip(self.a.tolist(), self.num.tolist(), self.den.tolist()):
            if den:
                x = Fraction(a, self.b) if self.b else None
                yield x, Fraction(num, den)


def coordinate_bound(
    pair: HomPair, B, complex_points: bool = False
) -> Tuple[float, int]:
    """
    Coordinate bound for primitive (a, b) with H(pi(a/b)) <= B.

    Returns the bound implied by height_lower_bound and the enumeration limit
    with the X_BOUND_SAFETY margin on top.
    """
    kappa = height_lower_bound(pair, complex_points)
    core = (float(B) / kappa) ** (1.0 / pair.k)
    return core, math.ceil(core * float(X_BOUND_SAFETY))


def _evaluate_row(pair: HomPair, a: np.ndarray, b: int, dtype) -> Tuple:
    k = pair.k
    out = []
    for which in (0, 1):
        acc = np.zeros(len(a), dtype=dtype)
        for j, coeff in enumerate(pair.coefficients(which)):
            if coeff:
                acc = acc + coeff * a**j * b ** (k - j)
        out.append(acc)
    return tuple(out)


def projective_images(
    pair: HomPair, B, bound: Optional[int] = None
) -> Iterator[ImageRow]:
    """
    Every point [a:b] of P^1(Q) with H([G0(a,b):G1(a,b)]) <= B, once each.

    Points are taken with b > 0, plus [1:0]; heights are reduced by the exact
    integer gcd of the two form values.
    """
    if bound is None:
        _, bound = coordinate_bound(pair, B)
    size = sum(abs(c) for w in (0, 1) for c in pair.coefficients(w))
    dtype = np.int64 if size * bound**pair.k < INT64_HEADROOM else object
    log.debug(f"coordinate bound {bound} for k={pair.k}, dtype {dtype}")
    for b in range(0, bound + 1):
        if b == 0:
            a = np.array([1], dtype=dtype)
        else:
            a = np.arange(-bound, bound + 1, dtype=np.int64)
            a = a[np.gcd(a, b) == 1].astype(dtype)
        g0, g1 = _evaluate_row(pair, a, b, dtype)
        g = np.gcd(g0, g1)
        sign = np.where(g1 < 0, -1, 1)
        num, den = sign * g0 // g, sign * g1 // g
        height = np.maximum(abs(num), abs(den))
        keep = height <= B
        if keep.any():
            yield ImageRow(b, a[keep], num[keep], den[keep])


def count_NQ1_direct(label: str, B) -> int:
    """#{x in P^1(Q): H(pi(x)) <= B} by exact integer evaluation."""
    record = get_record(label)
    if record.genus != 0:
        raise ValueError(f"{label} is not a genus-0 label")
    total = 0
    for row in projective_images(record.pi.homogenize(), B):
        total += len(row.a)
    log.info(f"N({label}, {B}) = {total}")
    return total


@dataclass
class GcdLemmaReport:
    bound: int
    checked: int = 0
    counterexample: Optional[Tuple[int, int, int]] = None

    @property
    def ok(self) -> bool:
        return self.counterexample is None

    def to_json(self) -> dict:
        return {
            "bound": self.bound,
            "checked": self.checked,
            "counterexample": self.counterexample,
            "ok": self.ok,
        }


def verify_gcd_lemma(bound: int, label: str = "8(2,1,1)") -> GcdLemmaReport:
    """gcd(G0(a, b), G1(a, b)) is 16 when a and b are both odd and 1 otherwise."""
    pair = get_record(label).pi.homogenize()
    report = GcdLemmaReport(bound)
    a = np.arange(-bound, bound + 1, dtype=np.int64)
    for b in range(-bound, bound + 1):
        coprime = a[np.gcd(a, b) == 1]
        g0, g1 = _evaluate_row(pair, coprime, b, np.int64)
        got = np.gcd(g0, g1)
        expected = np.where((coprime % 2 == 1) & (b % 2 == 1), 16, 1)
        bad = np.nonzero(got != expected)[0]
        report.checked += len(coprime)
        if len(bad):
            i = int(bad[0])
            report.counterexample = (int(coprime[i]), b, int(got[i]))
            log.error(f"gcd lemma fails at a={coprime[i]}, b={b}: gcd {got[i]}")
            return report
    return report


@dataclass
class FiberReport:
    label: str
    bound: int
    examined: int = 0
    exceptions: List[Tuple[str, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.examined > 0

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "bound": self.bound,
            "examined": self.examined,
            "exceptions": [{"c": c, "fiber": n} for c, n in self.exceptions],
        }


def fiber_size_report(
    label: str = "8(2,1,1)", bound: int = 10**4, count: int = 200
) -> FiberReport:
    """Rational fiber sizes of pi over the first non-degenerate parametrized c."""
    record = get_record(label)
    expected = record.aut_order
    report = FiberReport(label, bound)
    seen = set()
    for row in projective_images(record.pi.homogenize(), bound):
        for _, c in row.fractions():
            if c in seen:
                continue
            seen.add(c)
            if str(portrait_Q(c, method="closure")[1]) != label:
                continue
            report.examined += 1
            size = len(solve_fiber(label, c))
            if size != expected:
                report.exceptions.append((str(c), size))
            if report.examined >= count:
                return report
    return report
