"""
Exact p-adic volumes of regions max_i |F_i(x)|_p <= 1 for homogeneous integer forms.

Primitive vectors are split into affine charts by their first unit coordinate and
each chart is subdivided into residue classes mod p**m until the minimum valuation
of the forms is constant on the class.
"""
from fractions import Fraction
from functools import lru_cache
from itertools import product
from logging import NullHandler, getLogger
from typing import Dict, List, Sequence, Tuple, Union

import sympy

from ppcount.arith import IntPoly, padic_val
from ppcount.curves import HomPair, HomTriple
from ppcount.defaults import MP_DPS, PADIC_DEPTH_GUARD
from ppcount.exceptions import PPInvalidPolynomial, PPPadicDepthExceeded
from ppcount.utils import iv_dps, iv_rat

log = getLogger(__name__)
log.addHandler(NullHandler())

CHARTS = ("affine-Z_p-box", "full-Q_p-chart-decomposition")

Monomials = Tuple[Tuple[Tuple[int, ...], int], ...]


def _monomials(forms) -> Tuple[Tuple[Monomials, ...], int, int]:
    """Forms as (exponent, coefficient) tuples plus variable count and degree."""
    if isinstance(forms, HomPair):
        out = []
        for which in (0, 1):
            coeffs = forms.coefficients(which)
            out.append(
                tuple(((j, forms.k - j), a) for j, a in enumerate(coeffs) if a)
            )
        return tuple(out), 2, forms.k
    if isinstance(forms, HomTriple):
        out = tuple(tuple(forms.monomials(i)) for i in range(3))
        return out, 3, forms.degree
    out = []
    for form in forms:
        if isinstance(form, sympy.Poly):
            form = dict((m, int(a)) for m, a in form.terms())
        out.append(tuple(sorted((tuple(m), int(a)) for m, a in form.items() if a)))
    degrees = {sum(m) for terms in out for m, _ in terms}
    if len(degrees) != 1:
        raise PPInvalidPolynomial(f"forms are not homogeneous of one degree: {degrees}")
    n = len(out[0][0][0])
    return tuple(out), n, degrees.pop()


def _chart(terms: Monomials, i: int, p: int) -> Monomials:
    """Substitute x_i = 1 and x_j = p*s_j for j < i; remaining coordinates free."""
    out: Dict[Tuple[int, ...], int] = {}
    for exps, a in terms:
        scale = p ** sum(exps[:i])
        key = exps[:i] + exps[i + 1 :]
        out[key] = out.get(key, 0) + a * scale
    return tuple((m, a) for m, a in out.items() if a)


def _evaluate(terms: Monomials, point: Sequence[int]) -> int:
    acc = 0
    for exps, a in terms:
        term = a
        for x, e in zip(point, exps):
            if e:
                term *= x**e
        acc += term
    return acc


def _depth_guard(terms: Tuple[Monomials, ...], n: int, p: int) -> int:
    if n != 2 or len(terms) != 2:
        return PADIC_DEPTH_GUARD
    k = sum(terms[0][0][0])
    coeffs = []
    for form in terms:
        row = [0] * (k + 1)
        for (i, _), a in form:
            row[i] = a
        coeffs.append(IntPoly(tuple(row)) if any(row) else None)
    if None in coeffs:
        return PADIC_DEPTH_GUARD
    res = HomPair(coeffs[0], coeffs[1], k).resultant
    if res == 0:
        return PADIC_DEPTH_GUARD
    return padic_val(res, p) + 1


@lru_cache(maxsize=None)
def _density(terms: Tuple[Monomials, ...], n: int, p: int) -> Tuple:
    guard = _depth_guard(terms, n, p)
    mu: Dict[int, Fraction] = {}
    for i in range(n):
        weight = Fraction(p - 1, p) / p**i
        chart = [_chart(form, i, p) for form in terms]
        stack = [((0,) * (n - 1), 0)]
        while stack:
            residue, m = stack.pop()
            values = [_evaluate(form, residue) for form in chart]
            low = min(padic_val(v, p) for v in values)
            if low < m:
                mu[low] = mu.get(low, 0) + weight / p ** ((n - 1) * m)
                continue
            if m >= guard:
                raise PPPadicDepthExceeded(
                    f"class {residue} mod {p}^{m} unresolved; forms not coprime at {p}"
                )
            step = p**m
            for digits in product(range(p), repeat=n - 1):
                child = tuple(r + step * d for r, d in zip(residue, digits))
                stack.append((child, m + 1))
    log.debug(f"valuation density at p={p}: {mu}")
    return tuple(sorted(mu.items()))


def local_density(forms, p: int) -> Dict[int, Fraction]:
    """Measure of primitive vectors on which min_i v_p(F_i) equals each value."""
    terms, n, _ = _monomials(forms)
    return dict(_density(terms, n, p))


def padic_region_volume(
    forms: Union[HomPair, HomTriple, List],
    p: int,
    chart: str = "full-Q_p-chart-decomposition",
) -> Fraction:
    """
    Haar volume of {x in Q_p^n: max |F_i(x)|_p <= 1}, vol(Z_p^n) = 1.

    The "affine-Z_p-box" chart restricts to Z_p^n; the full decomposition adds
    the scaled copies p**-j * (primitive vectors) allowed by homogeneity.
    """
    if chart not in CHARTS:
        raise ValueError(f"unknown chart {chart}")
    terms, n, k = _monomials(forms)
    mu = _density(terms, n, p)
    total = Fraction(0)
    for g, measure in mu:
        if chart == "affine-Z_p-box":
            total += measure
        else:
            total += measure * Fraction(p) ** (n * (g // k))
    return total / (1 - Fraction(1, p**n))


def padic_local_factor(forms: Union[HomPair, HomTriple, List], p: int):
    """
    Local factor of a height count at p: the mean of max|F_i|_p**(-n/k) over
    primitive vectors, each primitive vector standing for one projective point.

    Equals padic_region_volume when every common valuation is a multiple of k
    and is returned as that exact Fraction; otherwise an mpmath.iv interval.
    """
    terms, n, k = _monomials(forms)
    mu = _density(terms, n, p)
    if all(g % k == 0 for g, _ in mu):
        return padic_region_volume(forms, p)
    log.debug(f"fractional weights at p={p}: valuations {[g for g, _ in mu]}")
    with iv_dps(MP_DPS) as iv:
        total = iv.mpf(0)
        for g, measure in mu:
            weight = iv.exp(iv_rat(Fraction(n * g, k)) * iv.log(iv.mpf(p)))
            total += iv_rat(measure) * weight
        return total / iv_rat(1 - Fraction(1, p**n))


def max_common_valuation(pair: HomPair, p: int) -> int:
    """Largest v_p(gcd(G0(a, b), G1(a, b))) over coprime integers a, b."""
    return max(g for g, _ in local_density(pair, p).items())
