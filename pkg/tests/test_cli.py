import json

import pytest
from pydantic import ValidationError

from ppcount.cli import config_from_args, run
from ppcount.exceptions import PPParseError
from ppcount.maps import LABELS
from ppcount.model import parse_bound

from .fixtures import c_42, pp


def test_parse_bound():
    assert parse_bound("2000") == 2000
    assert parse_bound("1e6") == 10**6
    assert parse_bound("10**8") == 10**8
    with pytest.raises(PPParseError):
        parse_bound("1.5")
    with pytest.raises(PPParseError):
        parse_bound("lots")


def test_config_labels():
    config = config_from_args(["census", "--B=100,1e3", "--labels=8_2_1_1,empty"])
    assert config.labels == ["8(2,1,1)", "∅"]
    assert config.B == [100, 1000]
    assert config.mode == "exhaustive"
    assert config.format == "tsv"
    config = config_from_args(["census", "--B=10", "--degree=2"])
    assert config.mode == "parametrized"
    with pytest.raises((PPParseError, ValidationError)):
        config_from_args(["census", "--B=10", "--labels=9_9"])


def test_portrait(capsys):
    assert run(["portrait", "--c=-91/36"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["label"] == "8(2,1,1)"
    assert len(data["points"]) == 8
    assert data["method"] == "lattice"


def test_portrait_gaussian(capsys):
    assert run(["portrait", "--c=0", "--disc=-1"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["points"]) == 5
    assert data["field"] == -1


def test_exit_codes(capsys):
    assert run(["portrait", "--c=one half"]) == 2
    assert run(["constants", "--label=8_1_1a", "--degree=2"]) == 4
    assert run(["census", "--B=5", "--mode=parametrized"]) == 4
    assert run(["constants", "--label=8_2_1_1,4_2"]) == 2
    assert run(["verify", "--suite=gcd", "--out=/nonexistent/dir/out.json"]) == 3
    assert "ppcount:" in capsys.readouterr().err


def test_census_tsv_output(tmp_path):
    out = tmp_path / "census.tsv"
    assert run(["census", "--B=20", f"--out={out}"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("label\tB\tdegree")
    assert len(lines) >= 1 + len(LABELS)


def test_constants_json(capsys):
    assert run(["constants", "--label=4_2"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["label"] == "4(2)"
    assert data["a"] == "1"


def test_api_portrait():
    graph, label = pp.portrait(c_42)
    assert str(label) == "4(2)"
    assert graph.n == 4
