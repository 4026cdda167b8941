import math
from dataclasses import dataclass
from logging import NullHandler, getLogger
from typing import Iterable, List, Sequence

from ppcount.census.census import CensusRow, census_deg2, count_label_deg1
from ppcount.constants.leading import LeadingConstant, leading_constant
from ppcount.curves import get_record
from ppcount.utils import dumps, tsv_lines

log = getLogger(__name__)
log.addHandler(NullHandler())


@dataclass(frozen=True)
class CompareRow:
    B: int
    empirical: int
    predicted: float
    ratio: float
    residual: float
    scaled_residual: float

    HEADER = ("B", "empirical", "predicted", "ratio", "residual", "scaled_residual")

    def cells(self) -> tuple:
        return (
            self.B,
            self.empirical,
            f"{self.predicted:.6g}",
            f"{self.ratio:.6f}",
            f"{self.residual:.6g}",
            f"{self.scaled_residual:.6g}",
        )

    def to_json(self) -> dict:
        return dict(zip(self.HEADER, self.cells()))


def error_scale(label: str, degree: int, B) -> float:
    """B**((2d - 1)/k) * log B for genus 0, with k the degree of pi."""
    record = get_record(label)
    if record.genus == 1 and degree == 1:
        return 1.0
    k = record.curve_degree
    return float(B) ** ((2 * degree - 1) / k) * math.log(float(B))


def empirical_count(label: str, degree: int, B: int, workers: int = 1) -> int:
    """Degree 1: S_{Q,1}; degree 2: Galois orbits of c counted by S_{Q,2}."""
    if degree == 1:
        return count_label_deg1(label, B, workers)
    row = census_deg2(B, [label], workers=workers)[0]
    return row.orbit_count


def compare_report(
    label: str,
    degree: int,
    B_list: Sequence[int],
    seed: int = 0,
    workers: int = 1,
    constant: LeadingConstant = None,
) -> List[CompareRow]:
    constant = constant or leading_constant(label, degree, seed=seed)
    rows = []
    for B in B_list:
        B = int(B)
        got = empirical_count(label, degree, B, workers)
        predicted = constant.predict(B)
        residual = got - predicted
        ratio = got / predicted if predicted else math.inf
        scaled = residual / error_scale(label, degree, B)
        rows.append(CompareRow(B, got, predicted, ratio, residual, scaled))
        log.info(f"{label} degree {degree} B={B}: ratio {ratio:.4f}")
    return rows


def census_tsv(rows: Iterable[CensusRow]) -> str:
    return tsv_lines(CensusRow.TSV_HEADER, (row.tsv_cells() for row in rows))


def census_json(rows: Iterable[CensusRow]) -> str:
    return dumps([row.to_json() for row in rows])


def compare_tsv(rows: Iterable[CompareRow]) -> str:
    return tsv_lines(CompareRow.HEADER, (row.cells() for row in rows))


def compare_json(rows: Iterable[CompareRow]) -> str:
    return dumps([row.to_json() for row in rows])
