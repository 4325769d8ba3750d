import json

import pytest

from relaxec.cli import main

AND = ".model a\n.inputs x y\n.outputs z\n.names x y z\n11 1\n.end\n"
OR = ".model o\n.inputs x y\n.outputs z\n.names x y z\n1- 1\n-1 1\n.end\n"


@pytest.fixture
def files(tmp_path):
    (tmp_path / "and.blif").write_text(AND)
    (tmp_path / "or.blif").write_text(OR)
    return tmp_path


def test_check_exit_codes(files, capsys):
    assert main(["check", str(files / "and.blif"), str(files / "and.blif")]) == 0
    assert "Equivalent" in capsys.readouterr().out
    assert main(["check", str(files / "and.blif"), str(files / "or.blif")]) == 1
    assert "witness" in capsys.readouterr().out


def test_gen_then_check(files):
    m = files / "m.blif"
    assert main(["gen", "mlp", "--k", "2", "-o", str(m)]) == 0
    assert main(["check", str(m), str(m)]) == 0
    assert main(["check", str(m), str(m), "--mode", "star"]) == 0


def test_json_byte_identical(files):
    outs = []
    for j in range(2):
        out = files / f"r{j}.json"
        main(["check", str(files / "and.blif"), str(files / "or.blif"), "--json", str(out)])
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["status"] == "Inequivalent"


def test_errors_exit_3(files, capsys):
    assert main(["nonsense"]) == 3
    assert main(["check", str(files / "missing.blif"), str(files / "and.blif")]) == 3
    (files / "bad.blif").write_text(".model b\n.inputs x\n.outputs z\n.names q z\n1 1\n.end\n")
    assert main(["check", str(files / "bad.blif"), str(files / "and.blif")]) == 3
    assert main(["dimacs", str(files / "and.blif"), str(files / "or.blif"), "--formula", "beta"]) == 3
    capsys.readouterr()


def test_boundary_image_beta_dimacs(files, capsys):
    a, o = str(files / "and.blif"), str(files / "or.blif")
    assert main(["boundary", a, a, "--cut", "1"]) == 0
    assert "certificate: witness" in capsys.readouterr().out
    assert main(["image", a, a, "--cut", "1"]) == 0
    assert main(["beta", a, o, "--cut", "0"]) == 1
    assert main(["dimacs", a, o, "--formula", "alpha"]) == 0
    assert capsys.readouterr().out.count("p cnf") >= 1


def test_gen_bug_uses_env_seed(files, monkeypatch):
    monkeypatch.setenv("RELAXEC_SEED", "3")
    main(["gen", "bug", "--k", "3", "--min-level", "2", "-o", str(files / "b1.blif")])
    main(["gen", "bug", "--k", "3", "--min-level", "2", "--seed", "3", "-o", str(files / "b2.blif")])
    assert (files / "b1.blif").read_text() == (files / "b2.blif").read_text()


def test_timeout_is_unknown(files):
    main(["gen", "hpair", "--k", "3", "-o", str(files / "hp")])
    assert main(["check", str(files / "hp_1.blif"), str(files / "hp_2.blif"),
                 "--timeout-ms", "1"]) == 2
