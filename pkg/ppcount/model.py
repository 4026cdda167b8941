"""
pydantic models for the JSON the command line writes, and for its run configuration.
"""
from decimal import Decimal, InvalidOperation
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator

from ppcount.exceptions import PPParseError
from ppcount.maps import cli_to_label

COMMANDS = ("portrait", "census", "constants", "verify", "compare")


def parse_bound(text: Union[str, int, float]) -> int:
    """Height bounds such as 2000, 1e6 or 10**8 as exact integers."""
    if isinstance(text, int):
        return text
    text = str(text).strip()
    if "**" in text:
        base, _, exp = text.partition("**")
        return int(base) ** int(exp)
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise PPParseError(f"cannot parse height bound {text!r}")
    if value != value.to_integral_value():
        raise PPParseError(f"height bound {text!r} is not an integer")
    return int(value)


class OrbitPointSchema(BaseModel):
    value: str
    m: int
    n: int


class PortraitOutput(BaseModel):
    c: str
    field: Optional[int] = None
    points: List[OrbitPointSchema]
    edges: List[List[int]]
    label: str
    code: str
    method: str = "lattice"


class IntervalSchema(BaseModel):
    value: float
    err: float


class ZetaSchema(IntervalSchema):
    s: int


class LocalVolumeSchema(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    place: str
    value: Union[IntervalSchema, str]
    lambda_: str = Field(alias="lambda")


class MonteCarloSchema(BaseModel):
    value: float
    stderr: float
    replicates: int
    points: int


class ConstantsOutput(BaseModel):
    label: str
    degree: int
    a: str
    b: str
    c: IntervalSchema
    decomposition: List[LocalVolumeSchema]
    zeta: Optional[ZetaSchema] = None
    aut: int
    archimedean_part: Optional[IntervalSchema] = None
    prefactor: str
    per_conjugate: Optional[IntervalSchema] = None
    monte_carlo: Optional[MonteCarloSchema] = None
    notes: List[str] = []


class AnomalySchema(BaseModel):
    c: str
    label: str
    reason: str
    detail: str = ""


class CensusRowSchema(BaseModel):
    label: str
    B: int
    degree: int
    mode: str
    count: int
    anomaly_count: int
    anomalies: List[AnomalySchema] = []
    orbit_count: Optional[int] = None
    generic_k: Optional[int] = None


class CompareRowSchema(BaseModel):
    B: int
    empirical: int
    predicted: str
    ratio: str
    residual: str
    scaled_residual: str


class CheckSchema(BaseModel):
    name: str
    ok: bool
    detail: str = ""


class VerifyOutput(BaseModel):
    suite: str
    ok: bool
    checks: List[CheckSchema]


class RunConfig(BaseModel):
    """Validated command-line configuration."""

    command: Literal["portrait", "census", "constants", "verify", "compare"]
    c: Optional[str] = None
    disc: Optional[int] = None
    degree: Literal[1, 2] = 1
    B: List[int] = []
    mode: Literal["exhaustive", "parametrized"] = "exhaustive"
    method: Literal["lattice", "closure"] = "lattice"
    labels: List[str] = []
    suite: str = "all"
    seed: int = Field(0, ge=0, lt=2**64)
    workers: int = Field(1, ge=1)
    out: Optional[str] = None
    format: Literal["tsv", "json"] = "tsv"
    verbose: int = 0

    @field_validator("B", mode="before")
    @classmethod
    def _split_bounds(cls, value):
        if value is None:
            return []
        if isinstance(value, (str, int)):
            value = str(value).split(",")
        return [parse_bound(v) for v in value if str(v).strip()]

    @field_validator("labels", mode="before")
    @classmethod
    def _split_labels(cls, value):
        if value is None:
            return []
        if isinstance(value, str):
            value = value.split(",")
        out = []
        for text in value:
            try:
                out.append(cli_to_label(text.strip()))
            except KeyError:
                raise PPParseError(f"unknown label {text!r}")
        return out
