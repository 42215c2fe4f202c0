import json

import pytest

from TropIntersect import main
from TropIntersect.cli import build_parser
from TropIntersect.cycle_io import load_cycle, parse_cycle_document
from TropIntersect.cycles import TropicalCycle, cycles_equal
from TropIntersect.polyhedra import Polyhedron


@pytest.fixture
def line_file(tmp_path):
    path = tmp_path / "line.yaml"
    assert main(["divisor", "R^2", "--function", "max(0,x,y)", "-o", str(path)]) == 0
    return path


def test_divisor_writes_the_standard_line(line_file):
    line = load_cycle(line_file)
    expected = TropicalCycle.from_fan([(1, 1), (-1, 0), (0, -1)], [[0], [1], [2]])
    assert cycles_equal(line, expected)


def test_intersect_line_with_itself(line_file, capsys):
    for method in ("stable", "diagonal"):
        assert main(["intersect", str(line_file), str(line_file), "--method", method]) == 0
        point = parse_cycle_document(capsys.readouterr().out)
        assert point.cells == (Polyhedron.point((0, 0)),)
        assert point.weights == (1,)


def test_divisor_power_from_whole_space(capsys):
    assert main(["divisor", "R^2", "--function", "max(0,x,y)", "--power", "2"]) == 0
    assert parse_cycle_document(capsys.readouterr().out).weights == (1,)


def test_balance_json(line_file, capsys):
    assert main(["balance", str(line_file), "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report == {"balanced": True, "offending": []}


def test_summary_text(line_file, capsys):
    assert main(["summary", str(line_file)]) == 0
    out = capsys.readouterr().out
    assert "balanced: True" in out
    assert "f_vector: 1 3" in out


def test_weight_space_and_skeleton(line_file, capsys):
    assert main(["weight-space", str(line_file), "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["dimension"] == 1
    assert report["irreducible"] is True

    assert main(["skeleton", str(line_file), "0"]) == 0
    assert parse_cycle_document(capsys.readouterr().out).cells == (Polyhedron.point((0, 0)),)


def test_product_with_whole_space(line_file, capsys):
    assert main(["product", str(line_file), "R^1"]) == 0
    prism = parse_cycle_document(capsys.readouterr().out)
    assert prism.ambient_dim == 3
    assert prism.dim == 2


def test_bergman_and_moduli_commands(capsys):
    assert main(["bergman", "--uniform", "2,3", "--json"]) == 0
    assert len(json.loads(capsys.readouterr().out)["maximal_cells"]) == 3

    assert main(["bergman", "--graphic", "4", "--method", "normalfan"]) == 0
    fan = parse_cycle_document(capsys.readouterr().out)
    assert fan.ambient_dim == 6

    assert main(["m0n", "5"]) == 0
    assert len(parse_cycle_document(capsys.readouterr().out).cells) == 15

    assert main(["local-m0n", "(1,2)", "--n", "5"]) == 0
    local = parse_cycle_document(capsys.readouterr().out)
    assert len(local.cells) == 3
    assert local.local_cone is not None


def test_psi_command(capsys):
    assert main(["psi", "9", "3,2,0,0,0,1,0,0,0"]) == 0
    assert parse_cycle_document(capsys.readouterr().out).weights == (60,)


def test_curve_conversions(capsys):
    assert main(["curve", "--n", "6", "--to-metric", "(1,2,3,4)"]) == 0
    assert capsys.readouterr().out == "0 0 0 1 1 0 0 1 1 0 1 1 1 1 0\n"

    assert main(["curve", "--from-metric", "0 0 0 1 1 0 0 1 1 0 1 1 1 1 0"]) == 0
    assert capsys.readouterr().out == "(1,2,3,4)\n"

    assert main(["curve", "--from-pruefer", "9,9,10,10,11,11,12,12,13,13,14,14"]) == 0
    assert capsys.readouterr().out == "(1,2) + (3,4) + (5,6) + (1,2,3,4) + (1,2,3,4,5,6)\n"

    assert main(["curve", "--n", "4", "--to-pruefer", "(1,3)"]) == 0
    assert capsys.readouterr().out == "(5,6,5,6)\n"

    assert main(["curve", "--n", "5", "--to-moduli", "(1,2):2"]) == 0
    assert capsys.readouterr().out == "2 0 0 0 0 0\n"

    assert main(["curve", "--from-moduli", "2 0 0 0 0 0"]) == 0
    assert capsys.readouterr().out == "(1,2):2\n"


@pytest.mark.parametrize(
    "argv",
    [
        ["curve", "--from-metric", "1 0 0 0 0 1"],
        ["curve", "--to-metric", "(1,2)"],
        ["psi", "5", "2,1,0,0,0"],
        ["divisor", "R^2", "--function", "max(0,x,"],
        ["bergman", "--uniform", "2"],
        ["bergman", "--uniform", "5,3"],
    ],
)
def test_errors_return_nonzero(argv):
    assert main(argv) == 1


def test_invalid_matroid_is_reported_not_raised(caplog):
    assert main(["bergman", "--uniform", "5,3"]) == 1
    assert "0 <= r <= n" in caplog.text


def test_missing_input_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="Input file not found"):
        main(["balance", str(tmp_path / "missing.yaml")])


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_bench_moduli_table(capsys):
    assert main(["bench", "moduli", "--n", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].split()[0] == "n"
    assert lines[1].split()[0] == "4"
