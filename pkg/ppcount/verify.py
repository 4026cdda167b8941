import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from logging import NullHandler, getLogger
from typing import Callable, Dict, List

import numpy as np
import sympy

from ppcount.arith import IntPoly
from ppcount.census import (
    census_deg1,
    census_deg2,
    count_label_deg1,
    count_NQ1_direct,
    count_rationals,
    fiber_size_report,
    verify_gcd_lemma,
)
from ppcount.census.census import rows_by_label
from ppcount.census.report import census_json
from ppcount.constants import (
    arch_volume_p1,
    area_R1,
    leading_constant_deg1,
    leading_constant_deg2,
    padic_region_volume,
    zeta_val,
)
from ppcount.curves import (
    get_record,
    sym2_halves_at_2,
    sym2_map_8211,
    verify_aut,
    verify_sym2,
)
from ppcount.defaults import (
    DYNATOMIC_CAP,
    GOOD_PRIME_LIMIT,
    SYM2_PRIME_LIMIT,
    SYM2_VOLUME_AT_2,
    VERIFY_BASELINE_B,
    VERIFY_CROSS_B,
    VERIFY_DEG1_BOUNDS,
    VERIFY_DEG2_BOUNDS,
    VERIFY_DETERMINISM_WORKERS,
    VERIFY_FIBER_COUNT,
    VERIFY_FIBER_MAX_EXCEPTIONS,
    VERIFY_GCD_RANGE,
    VERIFY_NQ1_BOUNDS,
    VERIFY_NQ1_RESIDUAL_C,
    VERIFY_RANK0_BOUNDS,
    VERIFY_SYM2_SAMPLES,
)
from ppcount.dynatomic import (
    degree_D,
    dynatomic,
    factorization_identity,
    telescoping_identity,
)
from ppcount.maps import LABELS
from ppcount.portraits import get_catalog
from ppcount.utils import dumps, iv_bounds, iv_to_pair

log = getLogger(__name__)
log.addHandler(NullHandler())


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "ok": bool(self.ok), "detail": self.detail}


@dataclass
class VerifyReport:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "checks": [check.to_json() for check in self.checks],
        }


def _mid(value) -> float:
    return iv_to_pair(value)["value"]


def suite_dynatomic(workers: int = 1) -> List[Check]:
    checks = []
    for N in range(1, 7):
        checks.append(Check(f"factorization N={N}", factorization_identity(N)))
    for N in range(1, DYNATOMIC_CAP + 1):
        got = dynatomic(N).deg_z
        checks.append(Check(f"deg Phi_{N}", got == degree_D(N), f"{got}"))
    for M in range(1, 4):
        for N in range(1, 4):
            checks.append(
                Check(f"Phi_{M},{N} telescoping", telescoping_identity(M, N))
            )
    return checks


def suite_catalog(workers: int = 1) -> List[Check]:
    checks = [Check("catalog shapes", not get_catalog().check())]
    for label in LABELS:
        report = verify_aut(label)
        checks.append(
            Check(f"Aut({label})", report.ok, f"{report.order}/{report.expected_order}")
        )
    return checks


def suite_gcd(workers: int = 1) -> List[Check]:
    report = verify_gcd_lemma(VERIFY_GCD_RANGE)
    return [Check("gcd lemma", report.ok, f"{report.checked} pairs")]


def suite_baseline(workers: int = 1) -> List[Check]:
    B = VERIFY_BASELINE_B
    got = count_rationals(B)
    main = 2 / _mid(zeta_val(2)) * B * B
    slack = 10 * B * math.log(B)
    return [Check("rational count", abs(got - main) <= slack, f"{got} vs {main:.1f}")]


def suite_local(workers: int = 1) -> List[Check]:
    checks = []
    lo, hi = iv_bounds(arch_volume_p1(IntPoly((0, 1)), IntPoly((1,)), 1, 2))
    checks.append(Check("w_inf(P^1) = 4", abs((lo + hi) / 2 - 4) <= 1e-6))
    pair = get_record("8(2,1,1)").pi.homogenize()
    for p in sympy.primerange(2, GOOD_PRIME_LIMIT + 1):
        expected = 2 if p == 2 else 1
        got = padic_region_volume(pair, p)
        checks.append(Check(f"area R_{p}(1)", got == expected, str(got)))
    triple = sym2_map_8211()
    for p in sympy.primerange(3, SYM2_PRIME_LIMIT + 1):
        got = padic_region_volume(triple, p)
        checks.append(Check(f"Vol S_{p}(1)", got == 1, str(got)))
    got = padic_region_volume(triple, 2)
    checks.append(Check("Vol S_2(1)", got == SYM2_VOLUME_AT_2, str(got)))
    checks.append(Check("S_2(1) contains y/2, y = (1,1,0) mod 2", sym2_halves_at_2()))
    for label in LABELS:
        record = get_record(label)
        pair = record.pi.homogenize()
        bad = set(sympy.factorint(abs(pair.resultant)))
        good = [p for p in sympy.primerange(2, GOOD_PRIME_LIMIT + 1) if p not in bad]
        values = {padic_region_volume(pair, p) for p in good}
        checks.append(Check(f"{label} good primes", values <= {Fraction(1)}))
    return checks


def suite_gauge(workers: int = 1) -> List[Check]:
    pair = get_record("8(2,1,1)").pi.homogenize()
    area = _mid(area_R1(pair))
    arch = _mid(arch_volume_p1(pair.g0, pair.g1, pair.k, 2))
    rel = abs(area - arch) / arch
    return [Check("area vs arch", rel <= 1e-3, f"{area:.6f} vs {arch:.6f}")]


def suite_nq1(workers: int = 1) -> List[Check]:
    pair = get_record("8(2,1,1)").pi.homogenize()
    area = _mid(area_R1(pair))
    zeta2 = _mid(zeta_val(2))
    checks = []
    scaled = []
    for B in VERIFY_NQ1_BOUNDS:
        got = count_NQ1_direct("8(2,1,1)", B)
        main = area / zeta2 * B**0.5
        scaled.append(abs(got - main) / (B**0.25 * math.log(B)))
        checks.append(Check(f"N(8(2,1,1), {B})", got > 0, f"ratio {got / main:.4f}"))
    ratio = count_NQ1_direct("8(2,1,1)", VERIFY_NQ1_BOUNDS[-1])
    ratio /= area / zeta2 * VERIFY_NQ1_BOUNDS[-1] ** 0.5
    checks.append(Check("ratio at largest B", abs(ratio - 1) <= 0.05, f"{ratio:.4f}"))
    checks.append(
        Check(
            "residual / (B^(1/4) log B) bounded",
            max(scaled) <= VERIFY_NQ1_RESIDUAL_C,
            f"{[round(s, 3) for s in scaled]}",
        )
    )
    return checks


def suite_theorem_deg1(workers: int = 1) -> List[Check]:
    constant = leading_constant_deg1("8(2,1,1)")
    ratios = []
    for B in VERIFY_DEG1_BOUNDS:
        got = count_label_deg1("8(2,1,1)", B, workers)
        ratios.append(got / constant.predict(B))
    last = ratios[-1]
    return [
        Check("ratio in [0.75, 1.25]", 0.75 <= last <= 1.25, f"{ratios}"),
        Check("ratio improves", abs(last - 1) <= abs(ratios[0] - 1), f"{ratios}"),
    ]


@lru_cache(maxsize=None)
def _exhaustive_rows(B: int, workers: int):
    return rows_by_label(census_deg1(B, "exhaustive", workers))


def suite_crossval(workers: int = 1) -> List[Check]:
    B = VERIFY_CROSS_B
    exhaustive = _exhaustive_rows(B, workers)
    parametrized = rows_by_label(census_deg1(B, "parametrized", workers))
    checks = []
    for label in LABELS:
        a, b = exhaustive[label].count, parametrized[label].count
        checks.append(Check(f"{label} at B={B}", a == b, f"{a} vs {b}"))
    total = sum(row.count for row in exhaustive.values())
    checks.append(Check("partition identity", total == count_rationals(B)))
    return checks


def suite_rank0(workers: int = 1) -> List[Check]:
    checks = []
    for label in ("10(2,1,1)a", "10(2,1,1)b"):
        rows = [_exhaustive_rows(B, workers)[label] for B in VERIFY_RANK0_BOUNDS]
        counts = [row.count for row in rows]
        from_points = count_label_deg1(label, VERIFY_RANK0_BOUNDS[-1], workers)
        checks.append(Check(f"{label} constant", len(set(counts)) == 1, f"{counts}"))
        checks.append(Check(f"{label} point search", counts[-1] == from_points))
    return checks


def suite_theorem_deg2(workers: int = 1) -> List[Check]:
    constant = leading_constant_deg2("8(2,1,1)")
    counts, ratios = [], []
    for B in VERIFY_DEG2_BOUNDS:
        row = census_deg2(B, ["8(2,1,1)"], workers=workers)[0]
        counts.append(row.orbit_count)
        ratios.append(row.orbit_count / constant.predict(B))
    finite = _mid(constant.finite_factor)
    alone = [r * finite for r in ratios]
    log.info(f"orbit counts over the archimedean part alone: {alone}")
    deviations = [abs(r - 1) for r in ratios]
    logs = np.log(np.array(VERIFY_DEG2_BOUNDS, dtype=float))
    slope = float(np.polyfit(logs, np.log(np.maximum(counts, 1)), 1)[0])
    return [
        Check("ratios finite and positive", all(0 < r < math.inf for r in ratios)),
        Check(
            "deviation non-increasing",
            all(b <= a for a, b in zip(deviations, deviations[1:])),
            f"{ratios}",
        ),
        Check("fitted exponent", 1.25 <= slope <= 1.75, f"{slope:.3f}"),
    ]


def suite_fiber(workers: int = 1) -> List[Check]:
    report = fiber_size_report(count=VERIFY_FIBER_COUNT)
    detail = f"{report.examined} examined, exceptions {report.exceptions}"
    return [
        Check("fibers examined", report.examined > 0, detail),
        Check(
            "exceptional fibers",
            len(report.exceptions) <= VERIFY_FIBER_MAX_EXCEPTIONS,
            detail,
        ),
    ]


def suite_sym2(workers: int = 1) -> List[Check]:
    report = verify_sym2(VERIFY_SYM2_SAMPLES)
    h0, h1, h2 = sym2_map_8211()(1, 0, 1)
    roots = np.roots([h0, -h1, h2])
    record = get_record("8(2,1,1)")
    target = abs(complex(sympy.N(record.pi.as_expr(sympy.I))))
    return [
        Check("Sym2 convention", report.ok, f"{report.convention}"),
        Check("[1,0,1] image", (h0, abs(h1), h2) == (256, 128, 16), f"{(h0, h1, h2)}"),
        Check("root magnitudes", bool(np.allclose(np.abs(roots), target))),
    ]


def suite_determinism(workers: int = 1) -> List[Check]:
    outputs = []
    for count in (1, VERIFY_DETERMINISM_WORKERS):
        outputs.append(
            (
                census_json(census_deg1(VERIFY_DEG1_BOUNDS[0], "parametrized", count)),
                census_json(census_deg2(VERIFY_DEG2_BOUNDS[0], workers=count)),
                dumps(leading_constant_deg2("8(2,1,1)").to_json()),
            )
        )
    names = ("degree-1 census", "degree-2 census", "degree-2 constant")
    return [Check(n, a == b) for n, a, b in zip(names, outputs[0], outputs[1])]


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "dynatomic": suite_dynatomic,
    "catalog": suite_catalog,
    "gcd": suite_gcd,
    "baseline": suite_baseline,
    "local": suite_local,
    "gauge": suite_gauge,
    "nq1": suite_nq1,
    "deg1": suite_theorem_deg1,
    "crossval": suite_crossval,
    "rank0": suite_rank0,
    "deg2": suite_theorem_deg2,
    "fiber": suite_fiber,
    "sym2": suite_sym2,
    "determinism": suite_determinism,
}


def run_suite(name: str, workers: int = 1) -> VerifyReport:
    if name == "all":
        report = VerifyReport("all")
        for suite in SUITES:
            report.checks.extend(run_suite(suite, workers).checks)
        return report
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name}; choose from {sorted(SUITES)}")
    report = VerifyReport(name, fn(workers))
    log.info(f"suite {name}: {'pass' if report.ok else 'FAIL'}")
    for check in report.checks:
        if not check.ok:
            log.warning(f"{name}: {check.name} failed {check.detail}")
    return report
