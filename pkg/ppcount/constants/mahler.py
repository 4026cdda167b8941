from fractions import Fraction
from logging import NullHandler, getLogger
from typing import Sequence, Union

import mpmath
import numpy as np

from ppcount.arith import IntPoly, height_quadratic, padic_val, rat_sqrt
from ppcount.defaults import MP_DPS
from ppcount.utils import iv_bounds, iv_dps, iv_rat

log = getLogger(__name__)
log.addHandler(NullHandler())


def _mahler_small(f: IntPoly) -> Union[Fraction, None]:
    """Exact M(f) for degree <= 2 when it is rational, else None."""
    if f.degree == 0:
        return Fraction(abs(f.lead))
    if f.degree == 1:
        return Fraction(max(abs(a) for a in f.coeffs))
    c, b, a = f.coeffs
    disc = b * b - 4 * a * c
    if disc < 0:
        return Fraction(max(abs(a), abs(c)))
    s = rat_sqrt(Fraction(disc))
    if s is None:
        return None
    out = Fraction(abs(a))
    for root in (Fraction(-b, 2 * a) + s / (2 * a), Fraction(-b, 2 * a) - s / (2 * a)):
        out *= max(1, abs(root))
    return out


def _mahler_roots(coeffs: Sequence):
    """Enclosure from polyroots with its error estimate folded into each root."""
    desc = list(reversed([mpmath.mpf(a) for a in coeffs]))
    with mpmath.workdps(MP_DPS):
        roots, err = mpmath.polyroots(desc, maxsteps=200, extraprec=60, error=True)
    with iv_dps(MP_DPS) as iv:
        out = iv.mpf(abs(desc[0]))
        slack = iv.mpf([-err, err])
        for root in roots:
            lo, hi = iv_bounds(iv.mpf(abs(root)) + slack)
            out *= iv.mpf([max(1, lo), max(1, hi)])
    return out


def mahler_inf(f: Union[IntPoly, Sequence]):
    """Archimedean Mahler measure |lead| * prod max(1, |root|) as an interval."""
    if not isinstance(f, IntPoly):
        coeffs = list(f)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise ValueError("zero polynomial")
        if len(coeffs) == 1:
            with iv_dps(MP_DPS) as iv:
                return iv.mpf(abs(mpmath.mpf(coeffs[0])))
        return _mahler_roots(coeffs)
    if f.degree <= 2:
        exact = _mahler_small(f)
        if exact is not None:
            return iv_rat(exact)
        enclosure = height_quadratic(f.primitive())
        with iv_dps(MP_DPS):
            return enclosure.mahler() * abs(f.content)
    return _mahler_roots(f.coeffs)


def mahler_p(f: IntPoly, p: int) -> Fraction:
    """Gauss norm max |a_i|_p."""
    low = min(padic_val(a, p) for a in f.coeffs if a)
    return Fraction(1, p**low)


def mahler_quadratic_np(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Vectorized M of a*z**2 + b*z + c with real coefficient arrays."""
    a, b, c = (np.asarray(t, dtype=float) for t in (a, b, c))
    disc = b * b - 4 * a * c
    out = np.maximum(np.abs(a), np.abs(c))
    real = disc >= 0
    root = np.sqrt(np.where(real, disc, 0.0))
    q = -0.5 * (b + np.where(b >= 0, root, -root))
    with np.errstate(divide="ignore", invalid="ignore"):
        r1 = np.abs(np.where(a != 0, q / a, 0.0))
        r2 = np.abs(np.where(q != 0, c / q, 0.0))
    both = np.abs(a) * np.maximum(1.0, r1) * np.maximum(1.0, r2)
    linear = a == 0
    lin_value = np.maximum(np.abs(b), np.abs(c))
    out = np.where(real, both, out)
    return np.where(linear, lin_value, out)
