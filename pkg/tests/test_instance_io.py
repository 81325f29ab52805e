from dataclasses import replace

import pandas as pd
import pytest

from conftest import assignment
from src.core import DerivedDims, Instance, InstanceFormatError, InstanceParams, Model
from src.generator import GeneratedInstance, derive_sub_seeds, generate
from src.instance_io import (
    csv_text,
    instance_lines,
    parse_dimacs,
    parse_instance,
    read_assignment,
    read_dimacs,
    read_instance,
    write_assignment,
    write_csv,
    write_dimacs,
    write_instance,
)
from src.sat_encoder import encode_direct

PARAMS = InstanceParams(k=2, n=8, alpha=0.8, r=1.0, p=0.3)


def _text(gi):
    return "\n".join(instance_lines(gi)) + "\n"


def test_round_trip_keeps_everything(tmp_path):
    for i, seed in enumerate(derive_sub_seeds(3, 12)):
        params = replace(PARAMS, seed=seed, forced=bool(i % 2),
                         model=Model.RD if i % 3 == 0 else Model.RB, k=2 + i % 2)
        gi = generate(params)
        back = read_instance(write_instance(gi, tmp_path / f"{i}.rbcsp"))
        assert back == gi


def test_empty_instance_round_trips():
    gi = GeneratedInstance(params=None, dims=DerivedDims(d=2, m=0), instance=Instance(n=3, d=2))
    assert parse_instance(_text(gi)) == gi


def test_floats_are_written_exactly():
    gi = generate(replace(PARAMS, alpha=0.1 + 0.2 + 0.6, seed=1))
    assert parse_instance(_text(gi)).params.alpha == gi.params.alpha


def test_comments_and_blank_lines_are_ignored():
    text = "# header comment\nRBCSP 1\n\nn 2 d 2 k 2 m 1\nc 0 1 1\n# tuple follows\n1 1\n"
    gi = parse_instance(text)
    assert gi.instance.constraints[0].forbidden == ((1, 1),)
    assert gi.params is None


def test_short_relation_reports_the_missing_line():
    text = "RBCSP 1\nn 3 d 2 k 2 m 1\nc 0 1 2\n0 0\n"
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.line_no == 5
    assert "declares 2 tuples" in str(err.value)


def test_relation_cut_short_by_next_constraint():
    text = "RBCSP 1\nn 3 d 2 k 2 m 2\nc 0 1 2\n0 0\nc 1 2 1\n1 1\n"
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.line_no == 5


@pytest.mark.parametrize("text,line", [
    ("RBCSP 2\nn 2 d 2 k 2 m 0\n", 1),
    ("RBCSP 1\nn 2 d 2 k 2 m 0\nc 0 2 0\n", 3),
    ("RBCSP 1\nn 2 d 2 k 2 m 1\nc 0 1 1\n0 2\n", 4),
    ("RBCSP 1\nn 2 d 2 k 2 m 1\nc 1 0 0\n", 3),
    ("RBCSP 1\nn 2 d 2 k 2 m 2\nc 0 1 0\n", 4),
    ("RBCSP 1\nn 2 d 2 k 2 m 0\nsolution 0 5\n", 3),
])
def test_malformed_files_name_their_line(text, line):
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(text)
    assert err.value.line_no == line


def test_assignment_files(tmp_path):
    a = assignment(3, 0, 2)
    assert read_assignment(write_assignment(a, tmp_path / "w.txt")) == a


def test_dimacs_round_trip(tmp_path, alternating_pair):
    f = encode_direct(alternating_pair, comments=["RBCSP n 2 d 2 m 1"])
    path = write_dimacs(f, tmp_path / "f.cnf")
    text = open(path, encoding="utf-8").read()
    assert text.startswith("c RBCSP n 2 d 2 m 1\np cnf 4 6\n")
    back = read_dimacs(path)
    assert back == f
    assert back.comments == ("RBCSP n 2 d 2 m 1",)


def test_dimacs_clause_count_mismatch():
    with pytest.raises(InstanceFormatError):
        parse_dimacs("p cnf 2 2\n1 2 0\n")


def test_csv_uses_six_significant_digits(tmp_path):
    frame = pd.DataFrame({"point": [0.1, 0.2], "mean_cost": [1 / 3, 12345678.9]})
    assert csv_text(frame) == "point,mean_cost\n0.1,0.333333\n0.2,1.23457e+07\n"
    path = write_csv(frame, tmp_path / "sub" / "x.csv")
    assert open(path, encoding="utf-8").read() == csv_text(frame)
