from functools import lru_cache
from logging import NullHandler, getLogger

from ppcount.defaults import MP_DPS, ZETA_TERMS
from ppcount.utils import iv_bounds, iv_dps

log = getLogger(__name__)
log.addHandler(NullHandler())


@lru_cache(maxsize=None)
def zeta_val(s: int, terms: int = ZETA_TERMS):
    """
    Certified enclosure of zeta(s) for s in {2, 3}.

    Euler-Maclaurin at N = terms: the partial sum below N, the integral tail,
    the half term and the B2 correction; the remainder is bounded by the
    magnitude of the B4 term.
    """
    if s not in (2, 3):
        raise ValueError(f"zeta_val supports s = 2 or 3, got {s}")
    with iv_dps(MP_DPS) as iv:
        acc = iv.mpf(0)
        for n in range(1, terms):
            acc += 1 / iv.mpf(n) ** s
        big = iv.mpf(terms)
        acc += big ** (1 - s) / (s - 1) + 1 / (2 * big**s)
        acc += iv.mpf(s) / (12 * big ** (s + 1))
        rem = iv.mpf(s * (s + 1) * (s + 2)) / (720 * big ** (s + 3))
        radius = iv_bounds(rem)[1]
        out = acc + iv.mpf([-radius, radius])
    log.debug(f"zeta({s}) enclosed in {out}")
    return out
