import json

import pytest

from stringlinks.cli import (BraidSyntaxError, EXIT_OK, EXIT_PARSE,
                             EXIT_PRECONDITION, main, parse_braid)
from stringlinks.words import Braid, braid_commutator


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_braid_grammar():
    assert parse_braid("A(1,2)", 3) == Braid.gen(3, 1, 2)
    assert parse_braid("A(1,2)^-1", 3) == Braid.gen(3, 1, 2, -1)
    assert parse_braid("A(1,2)^3", 3) == Braid.gen(3, 1, 2, 3)
    assert parse_braid("A(1,2) A(1,3)^-1", 3) == (
        Braid.gen(3, 1, 2) * Braid.gen(3, 1, 3, -1))
    assert parse_braid("", 3) == Braid.identity(3)
    com = parse_braid("[A(1,2), A(1,3)]", 3)
    assert com == braid_commutator(Braid.gen(3, 1, 2), Braid.gen(3, 1, 3))
    nested = parse_braid("[A(1,2), [A(1,2), A(1,3)]]", 3)
    assert nested == braid_commutator(
        Braid.gen(3, 1, 2),
        braid_commutator(Braid.gen(3, 1, 2), Braid.gen(3, 1, 3)))
    powered = parse_braid("[A(1,2), A(1,3)]^2", 3)
    assert powered == com * com


def test_parse_braid_errors():
    for bad in ["A(1", "A(1,2", "[A(1,2)]", "[A(1,2), A(1,3)", "A(2,1)",
                "B(1,2)", "A(1,2)]"]:
        with pytest.raises(BraidSyntaxError):
            parse_braid(bad, 3)


def test_milnor_command_linking_number(capsys):
    code, out, _ = run(capsys, "milnor", "--braid", "A(1,2)", "--n", "2",
                       "--k", "1", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    entries = {(e["i"], tuple(e["lyndonWord"])): e["coefficient"]
               for e in doc["entries"]}
    assert entries == {(1, (2,)): "1", (2, (1,)): "1"}


def test_milnor_empty_braid(capsys):
    code, out, _ = run(capsys, "milnor", "--braid", "", "--n", "2", "--k", "1",
                       "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["entries"] == []


def test_milnor_filtration_violation_exit_code(capsys):
    code, _, err = run(capsys, "milnor", "--braid", "A(1,2)", "--n", "2",
                       "--k", "2")
    assert code == EXIT_PRECONDITION
    assert "filtration" in err


def test_milnor_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "milnor", "--braid", "A(1", "--n", "2", "--k", "1")
    assert code == EXIT_PARSE


def test_level_command(capsys):
    code, out, _ = run(capsys, "level", "--braid", "[A(1,2), A(1,3)]", "--n", "3",
                       "--format", "json")
    assert code == EXIT_OK
    assert json.loads(out)["level"] == 2


def test_longitudes_command(capsys):
    code, out, _ = run(capsys, "longitudes", "--braid", "A(1,2)", "--n", "2")
    assert code == EXIT_OK
    assert "y_1 = x1*x2*x1^-1" in out
    assert "y_2 = x1" in out


def test_expansion_build_and_check(capsys, tmp_path):
    path = tmp_path / "theta.json"
    code, out, _ = run(capsys, "expansion", "build", "--n", "2", "--trunc", "4",
                       "--out", str(path))
    assert code == EXIT_OK and path.exists()
    code, out, _ = run(capsys, "expansion", "check", str(path))
    assert code == EXIT_OK
    assert "special" in out
    # tamper: break the normalised condition (still a valid Magnus expansion)
    doc = json.loads(path.read_text())
    doc["images"][0].append({"word": [1, 2], "coefficient": "7"})
    path.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "expansion", "check", str(path), "--format", "json")
    assert code == EXIT_PRECONDITION
    assert json.loads(out)["special"] is False


def test_homology_command(capsys):
    code, out, _ = run(capsys, "homology", "--n", "3", "--k", "2",
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    from stringlinks.lie import d_dimension
    assert doc["dimension"] == d_dimension(3, 2)


def test_trees_command_with_dot(capsys, tmp_path):
    code, out, _ = run(capsys, "trees", "--braid", "[A(1,2), A(1,3)]", "--n", "3",
                       "--k", "2", "--dot", "--output-dir", str(tmp_path),
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["terms"]
    assert doc["dotFiles"]
    for p in doc["dotFiles"]:
        assert open(p).read().startswith("graph")


def test_morita_command(capsys):
    code, out, _ = run(capsys, "morita", "--braid", "[A(1,2), A(1,3)]", "--n", "3",
                       "--k", "1", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["diagramCommutes"] is True
    assert doc["class"]["homology"]["fingerprint"]


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "--braid", "[A(1,2), A(1,3)]", "--n", "3",
                       "--k", "2")
    assert code == EXIT_OK
    assert "[FAIL]" not in out


def test_json_output_is_deterministic(capsys):
    args = ("milnor", "--braid", "[A(1,2), A(1,3)]", "--n", "3", "--k", "2",
            "--format", "json")
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
