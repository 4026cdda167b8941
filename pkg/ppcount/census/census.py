from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from logging import NullHandler, getLogger
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ppcount.arith import (
    QuadElem,
    height_at_most,
    height_rational,
    iter_quadratic_minpolys,
    quadratic_roots,
)
from ppcount.census.counting import coordinate_bound, projective_images
from ppcount.census.enumerate import (
    count_rationals,
    enum_rationals,
    square_denominator_rationals,
)
from ppcount.curves import generate_c_degree1, generate_cK_degree2, get_record
from ppcount.defaults import (
    BOUNDARY_ALLOWLIST,
    CENSUS_PERIOD_CAP,
    DEG2_EXHAUSTIVE_MAX_B,
    NUMERATOR_SHARDS,
    PARAMETRIZED_MIN_B,
    X_BOUND_SAFETY,
)
from ppcount.exceptions import PPCensusRefused, PPUnknownLabel
from ppcount.maps import LABELS, label_to_cli
from ppcount.portraits import PortraitLabel, classify
from ppcount.preper import (
    portrait_Q,
    portrait_quad,
    quad_fields_with_new_points,
    skipped_fields,
)

log = getLogger(__name__)
log.addHandler(NullHandler())

MODES = ("exhaustive", "parametrized")

# every nonempty portrait over Q carries a rational cycle of length 1, 2 or 3
CYCLE_FAMILIES = ("4(1,1)", "4(2)", "6(3)")


@dataclass(frozen=True)
class Anomaly:
    c: str
    label: str
    reason: str
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "label": self.label,
            "reason": self.reason,
            "detail": self.detail,
        }


@dataclass
class CensusRow:
    label: str
    B: int
    degree: int
    mode: str
    count: int
    anomalies: List[Anomaly] = field(default_factory=list)
    orbit_count: Optional[int] = None
    generic_k: int = 0

    TSV_HEADER = ("label", "B", "degree", "mode", "count", "anomaly_count")

    @property
    def cli_label(self) -> str:
        return label_to_cli(self.label) if self.label in LABELS else self.label

    def tsv_cells(self) -> Tuple:
        return (
            self.cli_label,
            self.B,
            self.degree,
            self.mode,
            self.count,
            len(self.anomalies),
        )

    def to_json(self) -> dict:
        out = {
            "label": self.cli_label,
            "B": self.B,
            "degree": self.degree,
            "mode": self.mode,
            "count": self.count,
            "anomaly_count": len(self.anomalies),
            "anomalies": [a.to_json() for a in self.anomalies],
        }
        if self.orbit_count is not None:
            out["orbit_count"] = self.orbit_count
            out["generic_k"] = self.generic_k
        return out


@dataclass
class Tally:
    """Partial census result of one shard; merging is associative."""

    counts: Counter = field(default_factory=Counter)
    orbits: Counter = field(default_factory=Counter)
    generic_k: Counter = field(default_factory=Counter)
    anomalies: List[Anomaly] = field(default_factory=list)
    examined: int = 0

    def add(self, c, label: PortraitLabel, size: int) -> None:
        name = str(label)
        self.counts[name] += 1
        self.orbits[name] += 1
        if label.is_other:
            self.anomalies.append(Anomaly(str(c), name, "other", f"{size} vertices"))

    def merge(self, other: "Tally") -> "Tally":
        return Tally(
            self.counts + other.counts,
            self.orbits + other.orbits,
            self.generic_k + other.generic_k,
            self.anomalies + other.anomalies,
            self.examined + other.examined,
        )


def _exhaustive_deg1_shard(B: int, shard: int, shards: int) -> Tally:
    tally = Tally()
    for c in square_denominator_rationals(B, shard, shards):
        tally.examined += 1
        graph, label = portrait_Q(c)
        tally.add(c, label, graph.n)
    log.debug(f"shard {shard}/{shards}: {tally.examined} square-denominator c")
    return tally


def _classify_deg1_shard(values: Sequence[Fraction], method: str) -> Tally:
    tally = Tally()
    for c in values:
        tally.examined += 1
        graph, label = portrait_Q(c, method=method)
        tally.add(c, label, graph.n)
    return tally


def _rational_deg2_labels(c: Fraction) -> Tuple[set, str, List[int]]:
    """Labels realized by rational c over some quadratic field, the generic-K
    label (the Q-portrait, unchanged in fields adding no points) and the fields
    left unsearched by the census period cap."""
    labels = set()
    for fld, points in quad_fields_with_new_points(c, CENSUS_PERIOD_CAP):
        labels.add(str(classify(points.graph)))
    generic = str(portrait_Q(c)[1])
    return labels, generic, skipped_fields(c, CENSUS_PERIOD_CAP)


def _classify_deg2_shard(values: Sequence, targets: Sequence[str]) -> Tally:
    tally = Tally()
    targets = set(targets)
    for c in values:
        tally.examined += 1
        if isinstance(c, QuadElem):
            graph, label = portrait_quad(c)
            if label.is_other and graph.n > 10:
                tally.anomalies.append(
                    Anomaly(str(c), str(label), "other", f"{graph.n} vertices")
                )
            if str(label) in targets or (label.is_other and graph.n > 10):
                # c and its conjugate share a portrait
                tally.counts[str(label)] += 2
                tally.orbits[str(label)] += 1
            continue
        labels, generic, skipped = _rational_deg2_labels(c)
        if skipped:
            detail = f"fields {skipped} beyond period {CENSUS_PERIOD_CAP}"
            for name in sorted(targets):
                tally.anomalies.append(Anomaly(str(c), name, "cap-boundary", detail))
        for name in targets & (labels | {generic}):
            tally.counts[name] += 1
            tally.orbits[name] += 1
            if name not in labels:
                tally.generic_k[name] += 1
    return tally


def _split(values: List, shards: int) -> List[List]:
    return [values[i::shards] for i in range(shards)]


class Census(object):
    """
    Base class of the portrait censuses.

    Subclasses set degree and mode and produce their shard jobs; the base class
    validates the height bound, runs shards and merges them in shard order.
    """

    degree = None
    mode = None
    _min_B = 1
    _max_B = None

    def __init__(
        self,
        B: int,
        labels: Optional[Iterable[str]] = None,
        workers: int = 1,
        shards: int = NUMERATOR_SHARDS,
    ):
        self.B = int(B)
        self.labels = list(labels) if labels else list(LABELS)
        self.workers = max(1, int(workers))
        self.shards = max(1, int(shards))
        self.anomalies: List[Anomaly] = []
        self._validate()

    def _validate(self) -> None:
        if self.B < self._min_B:
            raise PPCensusRefused(f"{self.mode} census needs B >= {self._min_B}")
        if self._max_B is not None and self.B > self._max_B:
            raise PPCensusRefused(f"{self.mode} census capped at B <= {self._max_B}")
        for label in self.labels:
            if label not in LABELS:
                raise PPUnknownLabel(label)

    def _jobs(self) -> List[Tuple]:
        """(function, args) pairs; overridden in subclasses."""
        raise NotImplementedError

    def _run_jobs(self) -> Tally:
        jobs = self._jobs()
        log.info(f"{self.mode} census at B={self.B}: {len(jobs)} jobs")
        if self.workers == 1:
            results = [fn(*args) for fn, args in jobs]
        else:
            with ProcessPoolExecutor(max_workers=self.workers) as ex:
                futures = [ex.submit(fn, *args) for fn, args in jobs]
                results = [f.result() for f in futures]
        total = Tally()
        for result in results:
            total = total.merge(result)
        return total

    def _rows(self, tally: Tally) -> List[CensusRow]:
        rows = []
        others = sorted(name for name in tally.counts if name not in LABELS)
        anomalies = sorted(
            tally.anomalies + self.anomalies, key=lambda a: (a.label, a.c, a.reason)
        )
        for name in [lb for lb in LABELS if lb in self.labels] + others:
            rows.append(
                CensusRow(
                    label=name,
                    B=self.B,
                    degree=self.degree,
                    mode=self.mode,
                    count=tally.counts.get(name, 0),
                    anomalies=[a for a in anomalies if a.label == name],
                    orbit_count=tally.orbits.get(name, 0) if self.degree == 2 else None,
                    generic_k=tally.generic_k.get(name, 0),
                )
            )
        return rows

    def run(self) -> List[CensusRow]:
        return self._rows(self._run_jobs())


class ExhaustiveCensusDeg1(Census):
    degree = 1
    mode = "exhaustive"

    def _jobs(self) -> List[Tuple]:
        return [
            (_exhaustive_deg1_shard, (self.B, shard, self.shards))
            for shard in range(self.shards)
        ]

    def run(self) -> List[CensusRow]:
        tally = self._run_jobs()
        # c without square denominator has no rational preperiodic points
        tally.counts["∅"] += count_rationals(self.B) - tally.examined
        return self._rows(tally)


def deg1_candidates(
    B: int, families: Sequence[str] = CYCLE_FAMILIES
) -> Tuple[List[Fraction], List[Anomaly]]:
    """c with H(c) <= B carrying a rational cycle from one of the families."""
    seen = set()
    anomalies = []
    for label in families:
        pair = get_record(label).pi.homogenize()
        core, bound = coordinate_bound(pair, B)
        for row in projective_images(pair, B, bound):
            for x, c in row.fractions():
                seen.add(c)
                # reached only through the safety margin on the coordinate bound
                if x is not None and max(abs(x.numerator), x.denominator) > core:
                    anomalies.append(Anomaly(str(c), "", "cap-boundary", f"x={x}"))
        log.debug(f"{label}: {len(seen)} candidates so far (bound {bound})")
    seen.update(c for c in BOUNDARY_ALLOWLIST if height_rational(c) <= B)
    return sorted(seen), anomalies


class ParametrizedCensusDeg1(Census):
    degree = 1
    mode = "parametrized"
    _min_B = PARAMETRIZED_MIN_B

    def _jobs(self) -> List[Tuple]:
        candidates, found = deg1_candidates(self.B)
        self.anomalies = []
        for a in found:
            label = portrait_Q(Fraction(a.c), "closure")[1]
            self.anomalies.append(Anomaly(a.c, str(label), a.reason, a.detail))
        return [
            (_classify_deg1_shard, (chunk, "closure"))
            for chunk in _split(candidates, self.shards)
        ]

    def run(self) -> List[CensusRow]:
        tally = self._run_jobs()
        nonempty = tally.examined - tally.counts.get("∅", 0)
        tally.counts["∅"] = count_rationals(self.B) - nonempty
        return self._rows(tally)


class LabelCensusDeg1(Census):
    """S_{Q,1} for chosen labels, enumerating only their own parametrizations."""

    degree = 1
    mode = "parametrized"

    def _jobs(self) -> List[Tuple]:
        values = set()
        for label in self.labels:
            record = get_record(label)
            _, bound = coordinate_bound(record.pi.homogenize(), self.B)
            if record.genus == 0:
                for row in projective_images(record.pi.homogenize(), self.B, bound):
                    values.update(c for _, c in row.fractions())
                continue
            for _, c in generate_c_degree1(label, bound):
                if height_rational(c) <= self.B:
                    values.add(c)
        return [
            (_classify_deg1_shard, (chunk, "closure"))
            for chunk in _split(sorted(values), self.shards)
        ]


def count_label_deg1(label: str, B: int, workers: int = 1) -> int:
    """S_{Q,1}(label, B) from the label's own parametrization."""
    rows = LabelCensusDeg1(B, [label], workers=workers).run()
    return rows_by_label(rows)[label].count


def census_deg1(
    B: int, mode: str = "exhaustive", workers: int = 1, shards: int = NUMERATOR_SHARDS
) -> List[CensusRow]:
    if mode == "exhaustive":
        return ExhaustiveCensusDeg1(B, workers=workers, shards=shards).run()
    if mode == "parametrized":
        return ParametrizedCensusDeg1(B, workers=workers, shards=shards).run()
    raise ValueError(f"unknown mode {mode}")


def deg2_candidates(B: int, label: str) -> set:
    """Quadratic and rational c with H(c) <= B from the label's covering family."""
    record = get_record(label)
    pair = record.pi.homogenize()
    core, _ = coordinate_bound(pair, B, complex_points=True)
    hbound = core * float(X_BOUND_SAFETY)
    out = set()
    for c, _ in generate_cK_degree2(label, hbound):
        if height_at_most(c, B):
            out.add(c)
    if record.genus == 0:
        for _, c in generate_c_degree1(label, int(hbound)):
            if height_rational(c) <= B:
                out.add(c)
    log.debug(f"{label}: {len(out)} degree-2 candidates at B={B}")
    return out


def _conjugate_representatives(values: Iterable) -> List:
    """One element of each conjugate pair, rationals kept."""
    out = {}
    for c in values:
        if isinstance(c, QuadElem) and not c.is_rational:
            key = tuple(sorted((str(c), str(c.conj()))))
            out.setdefault(key, c)
        else:
            value = c.u if isinstance(c, QuadElem) else Fraction(c)
            out.setdefault((str(value),), value)
    return [out[key] for key in sorted(out)]


class ParametrizedCensusDeg2(Census):
    degree = 2
    mode = "parametrized"

    def _jobs(self) -> List[Tuple]:
        values = set()
        for label in self.labels:
            values.update(deg2_candidates(self.B, label))
        reps = _conjugate_representatives(values)
        return [
            (_classify_deg2_shard, (chunk, self.labels))
            for chunk in _split(reps, self.shards)
        ]


class ExhaustiveCensusDeg2(Census):
    degree = 2
    mode = "exhaustive"
    _max_B = DEG2_EXHAUSTIVE_MAX_B

    def _jobs(self) -> List[Tuple]:
        values = list(enum_rationals(self.B))
        for minpoly in iter_quadratic_minpolys(self.B):
            values.append(quadratic_roots(minpoly)[0])
        reps = _conjugate_representatives(values)
        return [
            (_classify_deg2_shard, (chunk, self.labels))
            for chunk in _split(reps, self.shards)
        ]


def census_deg2(
    B: int,
    labels: Optional[Sequence[str]] = None,
    mode: str = "parametrized",
    workers: int = 1,
    shards: int = NUMERATOR_SHARDS,
) -> List[CensusRow]:
    labels = list(labels) if labels else ["8(2,1,1)"]
    for label in labels:
        if label not in LABELS:
            raise PPUnknownLabel(label)
    if mode == "parametrized":
        rows = ParametrizedCensusDeg2(B, labels, workers, shards).run()
    elif mode == "exhaustive":
        rows = ExhaustiveCensusDeg2(B, labels, workers, shards).run()
    else:
        raise ValueError(f"unknown mode {mode}")
    for row in rows:
        if row.generic_k:
            log.warning(f"{row.label}: {row.generic_k} generic-K matches at B={B}")
    return rows


def rows_by_label(rows: Iterable[CensusRow]) -> Dict[str, CensusRow]:
    return {row.label: row for row in rows}
