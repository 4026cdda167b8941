import hashlib
import json
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Tuple, Union

import mpmath


@contextmanager
def iv_dps(dps: int):
    """Temporarily raise the working precision of mpmath.iv."""
    saved = mpmath.iv.dps
    mpmath.iv.dps = dps
    try:
        yield mpmath.iv
    finally:
        mpmath.iv.dps = saved


def iv_rat(x: Union[int, Fraction]):
    x = Fraction(x)
    return mpmath.iv.mpf(x.numerator) / x.denominator


def iv_bounds(value) -> Tuple:
    return mpmath.mpf(value.a), mpmath.mpf(value.b)


def iv_to_pair(value) -> dict:
    """Serialize an interval as midpoint and half-width."""
    lo, hi = iv_bounds(value)
    return {"value": float((lo + hi) / 2), "err": float((hi - lo) / 2)}


def sha256_file(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def json_default(obj):
    """Fractions as strings, bytes as hex, anything else through str."""
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, bytes):
        return obj.hex()
    return str(obj)


def dumps(obj) -> str:
    return json.dumps(obj, default=json_default, sort_keys=True)


def tsv_lines(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(str(cell) for cell in row))
    return "\n".join(lines) + "\n"
