from dataclasses import dataclass, field
from fractions import Fraction
from logging import NullHandler, getLogger
from typing import Dict, List, Optional, Union

import mpmath

from ppcount.constants.archimedean import VolumeEstimate, arch_volume_p1, vol_S1
from ppcount.constants.padic import padic_local_factor
from ppcount.constants.zeta import zeta_val
from ppcount.curves import (
    SYM2_PINNED,
    bad_primes,
    get_record,
    sym2_forms,
    sym2_map_8211,
    torsion,
)
from ppcount.defaults import DEFAULT_RANKS, MP_DPS
from ppcount.exceptions import PPUnsupported
from ppcount.maps import INFINITY
from ppcount.utils import iv_bounds, iv_dps, iv_rat, iv_to_pair

log = getLogger(__name__)
log.addHandler(NullHandler())


@dataclass(frozen=True)
class LocalVolume:
    """
    Normalized local factor w_v / lambda_v of a leading constant.

    value is an interval at infinity and at a prime whose weights are fractional
    powers of p, an exact rational otherwise; lambda_ is the regularizer recorded
    alongside it.
    """

    place: Union[str, int]
    value: object
    lambda_: Fraction

    @property
    def is_archimedean(self) -> bool:
        return self.place == INFINITY

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, (int, Fraction))

    def interval(self):
        return iv_rat(self.value) if self.is_exact else self.value

    def to_json(self) -> dict:
        value = str(self.value) if self.is_exact else iv_to_pair(self.value)
        return {"place": str(self.place), "value": value, "lambda": str(self.lambda_)}


@dataclass
class LeadingConstant:
    label: str
    degree: int
    a: Fraction
    b: Fraction
    c: object
    prefactor: Fraction
    aut_order: int
    decomposition: List[LocalVolume] = field(default_factory=list)
    zeta_s: Optional[int] = None
    zeta: object = None
    per_conjugate: object = None
    mc: Optional[VolumeEstimate] = None
    notes: List[str] = field(default_factory=list)

    def reassemble(self, places: str = "all"):
        """Product of the factors; places='archimedean' drops the finite ones."""
        with iv_dps(MP_DPS):
            out = iv_rat(self.prefactor)
            if self.zeta is not None:
                out = out / self.zeta
            for local in self.decomposition:
                if places == "all" or local.is_archimedean:
                    out = out * local.interval()
        return out

    @property
    def finite_factor(self):
        with iv_dps(MP_DPS):
            out = iv_rat(1)
            for local in self.decomposition:
                if not local.is_archimedean:
                    out = out * local.interval()
        return out

    def check(self, rel: float = 1e-9) -> bool:
        """Assembled value equals the product of its factors."""
        lo, hi = iv_bounds(self.c)
        rlo, rhi = iv_bounds(self.reassemble())
        scale = max(abs(hi), mpmath.mpf(1e-300))
        return abs(lo - rlo) <= rel * scale and abs(hi - rhi) <= rel * scale

    def predict(self, B) -> float:
        """c * B**a * (log B)**b at the interval midpoint."""
        mid = iv_to_pair(self.c)["value"]
        out = mid * float(B) ** float(self.a)
        if self.b:
            out *= float(mpmath.log(B)) ** float(self.b)
        return out

    def to_json(self) -> Dict:
        out = {
            "label": self.label,
            "degree": self.degree,
            "a": str(self.a),
            "b": str(self.b),
            "c": iv_to_pair(self.c),
            "decomposition": [local.to_json() for local in self.decomposition],
            "zeta": None,
            "aut": self.aut_order,
            "prefactor": str(self.prefactor),
        }
        if any(not local.is_archimedean for local in self.decomposition):
            out["archimedean_part"] = iv_to_pair(self.reassemble("archimedean"))
        if self.zeta is not None:
            out["zeta"] = {"s": self.zeta_s, **iv_to_pair(self.zeta)}
        if self.per_conjugate is not None:
            out["per_conjugate"] = iv_to_pair(self.per_conjugate)
        if self.mc is not None:
            out["monte_carlo"] = {
                "value": self.mc.value,
                "stderr": self.mc.stderr,
                "replicates": self.mc.replicates,
                "points": self.mc.points,
            }
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _assemble(constant: LeadingConstant) -> LeadingConstant:
    constant.c = constant.reassemble()
    log.debug(f"{constant.label} degree {constant.degree}: c = {constant.c}")
    return constant


def _padic_factors(forms, pair, lam) -> List[LocalVolume]:
    out = []
    for p in bad_primes(pair):
        out.append(LocalVolume(p, padic_local_factor(forms, p), lam(p)))
    return out


def leading_constant_deg1(
    label: str, rank: Optional[int] = None, ranks: Optional[Dict[str, int]] = None
) -> LeadingConstant:
    """Leading constant of S_{Q,1}(P, B) ~ c * B**a."""
    record = get_record(label)
    if record.genus == 0:
        pair = record.pi.homogenize()
        k = pair.k
        w_inf = arch_volume_p1(pair.g0, pair.g1, k, 2)
        decomposition = [LocalVolume(INFINITY, w_inf, Fraction(1))]
        decomposition += _padic_factors(pair, pair, lambda p: 1 + Fraction(1, p))
        return _assemble(
            LeadingConstant(
                label=label,
                degree=1,
                a=Fraction(2, k),
                b=Fraction(0),
                c=None,
                prefactor=Fraction(1, 2 * record.aut_order),
                aut_order=record.aut_order,
                decomposition=decomposition,
                zeta_s=2,
                zeta=zeta_val(2),
            )
        )
    if record.genus == 1:
        if rank is None:
            rank = (ranks or DEFAULT_RANKS).get(label)
        if rank is None:
            raise PPUnsupported(f"{label}: Mordell-Weil rank must be supplied")
        if rank > 0:
            raise PPUnsupported(f"{label}: rank {rank} needs a regulator")
        tors = torsion(record)
        return _assemble(
            LeadingConstant(
                label=label,
                degree=1,
                a=Fraction(0),
                b=Fraction(0),
                c=None,
                prefactor=Fraction(tors, record.aut_order),
                aut_order=record.aut_order,
                notes=[f"torsion order {tors} from stabilized point count"],
            )
        )
    raise PPUnsupported(f"{label}: genus 2 carries finitely many rational points")


def leading_constant_deg2(label: str, seed: int = 0) -> LeadingConstant:
    """Leading constant of S_{Q,2}(P, B) for genus 0 and genus 2 labels."""
    record = get_record(label)
    pair = record.pi.homogenize()
    if record.genus == 0:
        k = pair.k
        triple = sym2_map_8211() if label == "8(2,1,1)" else sym2_forms(pair)
        mc = vol_S1(triple, seed=seed)
        with iv_dps(MP_DPS):
            w_inf = iv_rat(Fraction(3, 2)) * mc.interval()
        decomposition = [LocalVolume(INFINITY, w_inf, Fraction(1))]
        decomposition += _padic_factors(
            triple, pair, lambda p: (1 - Fraction(1, p**3)) / (1 - Fraction(1, p))
        )
        constant = _assemble(
            LeadingConstant(
                label=label,
                degree=2,
                a=Fraction(6, k),
                b=Fraction(0),
                c=None,
                prefactor=Fraction(1, 3 * record.aut_order),
                aut_order=record.aut_order,
                decomposition=decomposition,
                zeta_s=3,
                zeta=zeta_val(3),
                mc=mc,
                notes=[
                    "counts Galois orbits {c, conj(c)}",
                    f"Sym2 convention {SYM2_PINNED}",
                    f"finite places weighted by max|H_i|_p**(-3/{triple.degree}) "
                    "over primitive vectors; archimedean_part omits them",
                ],
            )
        )
        with iv_dps(MP_DPS):
            constant.per_conjugate = constant.c * 2
        return constant
    if record.genus == 2:
        k = record.curve_degree
        w_inf = arch_volume_p1(pair.g0, pair.g1, k, 4, hom_degree=pair.k)
        decomposition = [LocalVolume(INFINITY, w_inf, Fraction(1))]
        decomposition += _padic_factors(pair, pair, lambda p: 1 + Fraction(1, p))
        return _assemble(
            LeadingConstant(
                label=label,
                degree=2,
                a=Fraction(4, k),
                b=Fraction(0),
                c=None,
                prefactor=Fraction(1, record.aut_order),
                aut_order=record.aut_order,
                decomposition=decomposition,
                zeta_s=2,
                zeta=zeta_val(2),
                notes=[f"k = {k} is the degree of pi on the genus-2 curve"],
            )
        )
    raise PPUnsupported(
        f"{label}: degree-2 constants on genus-1 curves need Faltings-height "
        "volumes and Neron-Tate regulators, which are not implemented"
    )


def leading_constant(label: str, degree: int, seed: int = 0) -> LeadingConstant:
    if degree == 1:
        return leading_constant_deg1(label)
    if degree == 2:
        return leading_constant_deg2(label, seed=seed)
    raise PPUnsupported(f"degree {degree} is not supported")
