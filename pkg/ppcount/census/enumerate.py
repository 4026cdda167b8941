import math
from fractions import Fraction
from logging import NullHandler, getLogger
from typing import Iterator

import numpy as np

from ppcount.arith import iter_rationals

log = getLogger(__name__)
log.addHandler(NullHandler())


def enum_rationals(B: int) -> Iterator[Fraction]:
    """Each c in Q with H(c) <= B exactly once."""
    if B < 1:
        raise ValueError(f"height bound must be positive, got {B}")
    return iter_rationals(B)


def mobius_sieve(n: int) -> np.ndarray:
    """mu(0..n) with mu(0) = 0."""
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    composite = np.zeros(n + 1, dtype=bool)
    for p in range(2, n + 1):
        if composite[p]:
            continue
        composite[2 * p :: p] = True
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def count_rationals(B: int) -> int:
    """#{c in Q: H(c) <= B} = 1 + 2 * sum_d mu(d) * floor(B/d)**2."""
    B = int(B)
    if B < 1:
        return 0
    mu = mobius_sieve(B)[1:]
    quot = B // np.arange(1, B + 1, dtype=np.int64)
    return 1 + 2 * int((mu * quot * quot).sum())


def square_denominator_rationals(
    B: int, shard: int = 0, shards: int = 1
) -> Iterator[Fraction]:
    """c with H(c) <= B and square denominator, for roots s of the denominator
    congruent to shard mod shards."""
    if shard == 0:
        yield Fraction(0)
    for s in range(1, math.isqrt(B) + 1):
        if s % shards != shard:
            continue
        q = s * s
        for p in range(1, B + 1):
            if math.gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)
