import math
from dataclasses import dataclass
from fractions import Fraction
from logging import NullHandler, getLogger
from typing import List, Optional, Sequence

import mpmath
import numpy as np
from scipy.stats import qmc

from ppcount.arith import IntPoly
from ppcount.constants.mahler import mahler_quadratic_np
from ppcount.curves import HomPair, HomTriple, archimedean_floor
from ppcount.defaults import (
    AREA_ABS_TOL,
    AREA_MAX_LEVELS,
    BOX_SAFETY,
    MP_DPS,
    QMC_LOG2_POINTS,
    QMC_REPLICATES,
    QUAD_REL_TOL,
    UNIT_CIRCLE_SAMPLES,
)
from ppcount.exceptions import PPNonCoprimeForms, PPUnboundedRegion
from ppcount.utils import iv_dps

log = getLogger(__name__)
log.addHandler(NullHandler())

AREA_START_GRID = 64
AREA_CHUNK = 1 << 18


def _breakpoints(polys: Sequence[Sequence[int]]) -> List[float]:
    """Real roots in (-1, 1) of the given ascending coefficient lists."""
    points = set()
    for coeffs in polys:
        desc = list(reversed(coeffs))
        while desc and desc[0] == 0:
            desc.pop(0)
        if len(desc) < 2:
            continue
        for root in np.roots(np.array(desc, dtype=float)):
            if abs(root.imag) < 1e-12 and -1 < root.real < 1:
                points.add(float(root.real))
    return sorted(points)


def _kinks(a: Sequence[int], b: Sequence[int]) -> List[float]:
    size = max(len(a), len(b))
    a = list(a) + [0] * (size - len(a))
    b = list(b) + [0] * (size - len(b))
    plus = [x + y for x, y in zip(a, b)]
    minus = [x - y for x, y in zip(a, b)]
    return _breakpoints([a, b, plus, minus])


def _horner(coeffs: Sequence[int], x):
    acc = 0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def arch_volume_p1(
    g0: IntPoly,
    g1: IntPoly,
    k: int,
    exponent_num: int = 2,
    hom_degree: Optional[int] = None,
):
    """
    Interval for the integral over R of max(|g0(u)|, |g1(u)|)**(-e/k).

    hom_degree is the degree the pair is homogenized in for the substitution
    u = 1/t on |u| > 1; it defaults to k and differs on double covers, where k
    is the degree on the curve.
    """
    hom_degree = hom_degree or k
    pair = HomPair(g0, g1, hom_degree)
    if not pair.is_coprime():
        raise PPNonCoprimeForms(f"{g0} and {g1} share a projective zero")
    power = Fraction(exponent_num, k)
    t_power = hom_degree * power - 2
    if t_power < 0:
        raise ValueError(f"integral diverges at infinity for e={exponent_num}, k={k}")
    inner = (list(g0.coeffs), list(g1.coeffs))
    # G_i(1, t) in ascending powers of t
    outer = tuple(list(reversed(pair.coefficients(i))) for i in (0, 1))
    with mpmath.workdps(MP_DPS):
        exponent = mpmath.mpf(power.numerator) / power.denominator
        t_exp = mpmath.mpf(t_power.numerator) / t_power.denominator

        def near(u):
            top = max(abs(_horner(inner[0], u)), abs(_horner(inner[1], u)))
            return top ** (-exponent)

        def far(t):
            top = max(abs(_horner(outer[0], t)), abs(_horner(outer[1], t)))
            weight = abs(t) ** t_exp if t_exp else 1
            return weight * top ** (-exponent)

        total, err = mpmath.mpf(0), mpmath.mpf(0)
        for fn, coeffs in ((near, inner), (far, outer)):
            points = [-1] + _kinks(*coeffs) + [1]
            value, piece_err = mpmath.quad(fn, points, error=True)
            log.debug(f"quadrature piece over {len(points) - 1} intervals: {value}")
            total += value
            err += piece_err
        err = max(err, abs(total) * mpmath.mpf(10) ** (5 - MP_DPS))
    if err > QUAD_REL_TOL * abs(total):
        log.warning(f"quadrature error {err} above relative tolerance")
    with iv_dps(MP_DPS) as iv:
        return iv.mpf([total - err, total + err])


def _power_bounds(lo: np.ndarray, hi: np.ndarray, j: int):
    if j == 0:
        return np.ones_like(lo), np.ones_like(hi)
    plo, phi = lo**j, hi**j
    if j % 2:
        return plo, phi
    straddle = (lo <= 0) & (hi >= 0)
    return np.where(straddle, 0.0, np.minimum(plo, phi)), np.maximum(plo, phi)


def _form_bounds(coeffs: Sequence[int], k: int, x0, x1, y0, y1):
    """Interval enclosure of sum coeffs[j] x**j y**(k - j) over cells."""
    lo = np.zeros_like(x0)
    hi = np.zeros_like(x0)
    for j, a in enumerate(coeffs):
        if not a:
            continue
        alo, ahi = _power_bounds(x0, x1, j)
        blo, bhi = _power_bounds(y0, y1, k - j)
        prods = (alo * blo, alo * bhi, ahi * blo, ahi * bhi)
        mlo, mhi = np.minimum.reduce(prods), np.maximum.reduce(prods)
        if a > 0:
            lo += a * mlo
            hi += a * mhi
        else:
            lo += a * mhi
            hi += a * mlo
    return lo, hi


def _abs_bounds(lo, hi):
    straddle = (lo <= 0) & (hi >= 0)
    low = np.where(straddle, 0.0, np.minimum(np.abs(lo), np.abs(hi)))
    return low, np.maximum(np.abs(lo), np.abs(hi))


def _classify(pair: HomPair, xs: np.ndarray, ys: np.ndarray, h: float):
    """Masks of cells inside and outside R(1); the rest straddle its boundary."""
    lows, highs = [], []
    for which in (0, 1):
        lo, hi = _form_bounds(pair.coefficients(which), pair.k, xs, xs + h, ys, ys + h)
        lo, hi = _abs_bounds(lo, hi)
        lows.append(lo)
        highs.append(hi)
    inside = np.maximum(highs[0], highs[1]) <= 1.0
    outside = np.maximum(lows[0], lows[1]) > 1.0
    return inside, outside


def region_radius(pair: HomPair) -> float:
    floor = archimedean_floor(pair, UNIT_CIRCLE_SAMPLES)
    if not pair.is_coprime() or floor <= 0:
        raise PPUnboundedRegion(f"{pair.g0}, {pair.g1} vanish together on the line")
    return (float(BOX_SAFETY) * floor) ** (-1.0 / pair.k)


def area_R1(pair: HomPair, tol: float = AREA_ABS_TOL):
    """Area of {max(|G0|, |G1|) <= 1} in R^2 by interval cell subdivision."""
    r = region_radius(pair)
    h = 2 * r / AREA_START_GRID
    grid = -r + h * np.arange(AREA_START_GRID)
    xs, ys = (a.ravel() for a in np.meshgrid(grid, grid))
    inside_area = 0.0
    for level in range(AREA_MAX_LEVELS):
        pending_x, pending_y = [], []
        for start in range(0, len(xs), AREA_CHUNK):
            cx, cy = xs[start : start + AREA_CHUNK], ys[start : start + AREA_CHUNK]
            inside, outside = _classify(pair, cx, cy, h)
            inside_area += float(inside.sum()) * h * h
            keep = ~(inside | outside)
            pending_x.append(cx[keep])
            pending_y.append(cy[keep])
        xs, ys = np.concatenate(pending_x), np.concatenate(pending_y)
        undecided = len(xs) * h * h
        log.debug(f"level {level}: {len(xs)} boundary cells of side {h:.3g}")
        if undecided <= 2 * tol:
            break
        half = h / 2
        xs = np.concatenate([xs, xs + half, xs, xs + half])
        ys = np.concatenate([ys, ys, ys + half, ys + half])
        h = half
    else:
        log.warning(f"area subdivision stopped at {AREA_MAX_LEVELS} levels")
    with iv_dps(MP_DPS) as iv:
        return iv.mpf([inside_area, inside_area + undecided])


def _triple_values(triple: HomTriple, pts: np.ndarray) -> List[np.ndarray]:
    out = []
    for which in range(3):
        acc = np.zeros(len(pts))
        for (i, j, l), a in triple.monomials(which):
            acc += a * pts[:, 0] ** i * pts[:, 1] ** j * pts[:, 2] ** l
        out.append(acc)
    return out


def triple_floor(triple: HomTriple, samples: int = UNIT_CIRCLE_SAMPLES) -> float:
    """Sampled minimum of max(|H0|, |H1|/2, |H2|) on the boundary of the unit cube."""
    face = qmc.Sobol(d=2, scramble=False).random(samples) * 2 - 1
    best = math.inf
    for axis in range(3):
        for sign in (-1.0, 1.0):
            pts = np.insert(face, axis, sign, axis=1)
            h0, h1, h2 = _triple_values(triple, pts)
            value = np.maximum(np.maximum(np.abs(h0), np.abs(h1) / 2), np.abs(h2))
            best = min(best, float(value.min()))
    return best


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    stderr: float
    replicates: int
    points: int

    def interval(self):
        """Midpoint plus or minus one standard error."""
        with iv_dps(MP_DPS) as iv:
            return iv.mpf([self.value - self.stderr, self.value + self.stderr])


def vol_S1(
    triple: HomTriple,
    seed: int = 0,
    log2_points: int = QMC_LOG2_POINTS,
    replicates: int = QMC_REPLICATES,
) -> VolumeEstimate:
    """
    Volume of {x in R^3: M(H0 z**2 - H1 z + H2) <= 1} by scrambled Sobol replicates.

    M >= max(|H0|, |H1|/2, |H2|), so the region lies in the cube whose radius
    follows from that bound and the degree of the forms.
    """
    floor = triple_floor(triple)
    if floor <= 0:
        raise PPUnboundedRegion("forms vanish together on the unit cube boundary")
    r = (float(BOX_SAFETY) * floor) ** (-1.0 / triple.degree)
    box = (2 * r) ** 3
    estimates = []
    for child in np.random.SeedSequence(seed).spawn(replicates):
        sampler = qmc.Sobol(d=3, scramble=True, seed=np.random.default_rng(child))
        pts = -r + 2 * r * sampler.random_base2(m=log2_points)
        h0, h1, h2 = _triple_values(triple, pts)
        hits = mahler_quadratic_np(h0, -h1, h2) <= 1.0
        estimates.append(box * float(hits.mean()))
    estimates = np.array(estimates)
    stderr = 0.0
    if replicates > 1:
        stderr = float(estimates.std(ddof=1) / math.sqrt(replicates))
    log.info(f"Vol(S(1)) = {estimates.mean():.6g} +/- {stderr:.2g}")
    return VolumeEstimate(float(estimates.mean()), stderr, replicates, 1 << log2_points)
