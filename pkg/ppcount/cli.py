"""
Command-line front end: portrait, census, constants, verify and compare.
"""
import argparse
import sys
from logging import NullHandler, getLogger
from typing import List, Optional, Sequence

from pydantic import ValidationError

from ppcount import logging as pplogging
from ppcount.arith import QuadElem, parse_quad
from ppcount.census import census_deg1, census_deg2, compare_report
from ppcount.census.report import (
    census_json,
    census_tsv,
    compare_json,
    compare_tsv,
)
from ppcount.constants import leading_constant
from ppcount.exceptions import (
    PPCensusRefused,
    PPFieldMismatch,
    PPParseError,
    PPUnsupported,
)
from ppcount.maps import EXIT_CODES
from ppcount.model import (
    COMMANDS,
    CensusRowSchema,
    CompareRowSchema,
    ConstantsOutput,
    PortraitOutput,
    RunConfig,
    VerifyOutput,
)
from ppcount.portraits import canonical_code, classify
from ppcount.preper import preper_points_Q, preper_points_quad
from ppcount.utils import dumps, tsv_lines
from ppcount.verify import run_suite

log = getLogger(__name__)
log.addHandler(NullHandler())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppcount",
        description="Preperiodic portraits of z^2 + c and their height counts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--out", help="write output here instead of stdout")
        cmd.add_argument("--format", default="json" if name != "census" else "tsv")
        cmd.add_argument("--workers", default=1, type=int)
        cmd.add_argument("--seed", default=0, type=int)
        cmd.add_argument("-v", "--verbose", action="count", default=0)
    portrait = sub.choices["portrait"]
    portrait.add_argument("--c", required=True)
    portrait.add_argument("--disc", type=int)
    portrait.add_argument("--method", default="lattice")
    for name in ("census", "constants", "compare"):
        cmd = sub.choices[name]
        cmd.add_argument("--degree", default=1, type=int)
        cmd.add_argument("--labels", "--label", dest="labels")
    for name in ("census", "compare"):
        sub.choices[name].add_argument("--B", dest="B", required=True)
    sub.choices["census"].add_argument("--mode")
    sub.choices["verify"].add_argument("--suite", default="all")
    return parser


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if v is not None}
    if args.command == "census" and "mode" not in values:
        values["mode"] = "parametrized" if args.degree == 2 else "exhaustive"
    return RunConfig(**values)


def cmd_portrait(config: RunConfig) -> str:
    c = parse_quad(config.c, config.disc)
    if isinstance(c, QuadElem):
        points = preper_points_quad(c, method=config.method)
    else:
        points = preper_points_Q(c, method=config.method)
    label = classify(points.graph)
    data = points.to_json(label)
    data["code"] = canonical_code(points.graph).hex()
    data["method"] = points.method
    PortraitOutput.model_validate(data)
    log.info(f"c={config.c}: {label}")
    return dumps(data)


def cmd_census(config: RunConfig) -> str:
    rows = []
    for B in config.B:
        if config.degree == 1:
            found = census_deg1(B, config.mode, config.workers)
            if config.labels:
                found = [row for row in found if row.label in config.labels]
        else:
            found = census_deg2(B, config.labels or None, config.mode, config.workers)
        rows.extend(found)
    if config.format == "tsv":
        return census_tsv(rows)
    for row in rows:
        CensusRowSchema.model_validate(row.to_json())
    return census_json(rows)


def _single_label(config: RunConfig) -> str:
    if len(config.labels) != 1:
        raise PPParseError("exactly one --label is required")
    return config.labels[0]


def cmd_constants(config: RunConfig) -> str:
    label = _single_label(config)
    constant = leading_constant(label, config.degree, seed=config.seed)
    data = constant.to_json()
    ConstantsOutput.model_validate(data)
    if config.format == "tsv":
        header = ("label", "degree", "a", "b", "c", "err")
        row = (label, config.degree, data["a"], data["b"], *data["c"].values())
        return tsv_lines(header, [row])
    return dumps(data)


def cmd_compare(config: RunConfig) -> str:
    label = _single_label(config)
    rows = compare_report(
        label, config.degree, config.B, seed=config.seed, workers=config.workers
    )
    if config.format == "tsv":
        return compare_tsv(rows)
    for row in rows:
        CompareRowSchema.model_validate(row.to_json())
    return compare_json(rows)


def cmd_verify(config: RunConfig):
    report = run_suite(config.suite, config.workers)
    data = report.to_json()
    VerifyOutput.model_validate(data)
    if config.format == "tsv":
        rows = [(c["name"], c["ok"], c["detail"]) for c in data["checks"]]
        return tsv_lines(("check", "ok", "detail"), rows), report.ok
    return dumps(data), report.ok


def write_output(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    log.info(f"wrote {out}")


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = config_from_args(argv)
    except (PPParseError, ValidationError) as exc:
        sys.stderr.write(f"ppcount: {exc}\n")
        return EXIT_CODES["parse"]
    pplogging.configure(config.verbose)
    ok = True
    try:
        if config.command == "portrait":
            text = cmd_portrait(config)
        elif config.command == "census":
            text = cmd_census(config)
        elif config.command == "constants":
            text = cmd_constants(config)
        elif config.command == "compare":
            text = cmd_compare(config)
        else:
            text, ok = cmd_verify(config)
        write_output(text, config.out)
    except (PPParseError, PPFieldMismatch) as exc:
        sys.stderr.write(f"ppcount: {exc}\n")
        return EXIT_CODES["parse"]
    except (PPUnsupported, PPCensusRefused) as exc:
        sys.stderr.write(f"ppcount: {exc}\n")
        return EXIT_CODES["unsupported"]
    except OSError as exc:
        sys.stderr.write(f"ppcount: {exc}\n")
        return EXIT_CODES["io"]
    return EXIT_CODES["ok"] if ok else EXIT_CODES["failed"]


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(run(argv))
