import json
import subprocess
import sys

import pytest

from cphabe.cli import main

MSG = "ab" * 32


@pytest.fixture
def world(tmp_path):
    d = tmp_path
    reg = str(d / "reg.json")

    def run(*argv):
        assert main(list(argv)) == 0

    run("setup", "--preset", "small", "--seed", "cli", "--out", str(d))
    run("create-dm", "--parent", str(d / "rootmk.habe"), "--pk", "d1", "--out", str(d / "dm1.habe"), "--seed", "x")
    run("create-dm", "--parent", str(d / "dm1.habe"), "--pk", "d2", "--out", str(d / "dm2.habe"), "--seed", "x")
    run("registry", "add-domain", "--registry", reg, "--id", "D1", "--pk", "d1")
    run("registry", "add-domain", "--registry", reg, "--id", "D2", "--pk", "d2", "--parent", "D1")
    for name in ("a1", "a2", "a3"):
        run("registry", "add-attr", "--registry", reg, "--name", name, "--pk", name.encode().hex(), "--domain", "D2")
    for name in ("a1", "a2"):
        run("registry", "authorize", "--registry", reg, "--user-pk", "ee", "--attr", name)
        run("create-user", "--dm", str(d / "dm2.habe"), "--user-pk", "ee", "--attr", name, "--registry", reg,
            "--out", str(d))
    return d, reg


def test_pipeline_and_attacks(world, capsys):
    d, reg = world
    ct = str(d / "ct.habe")
    assert main(["encrypt", "--params", str(d / "params.habe"), "--policy", "(a1 & a2) | (a1 & a2 & a3)",
                 "--registry", reg, "--msg-hex", MSG, "--out", ct, "--seed", "e"]) == 0
    ident = str(d / "user-ee-D2.habe")
    k1, k2 = str(d / "user-ee-D2-a1.habe"), str(d / "user-ee-D2-a2.habe")
    capsys.readouterr()
    assert main(["decrypt", "--ct", ct, "--identity", ident, "--attr-keys", k1, k2]) == 0
    assert capsys.readouterr().out.strip() == MSG

    # a policy the user cannot satisfy
    ct2 = str(d / "ct2.habe")
    assert main(["encrypt", "--params", str(d / "params.habe"), "--policy", "(a1 & a2 & a3)",
                 "--registry", reg, "--msg-hex", MSG, "--out", ct2]) == 0
    capsys.readouterr()
    assert main(["decrypt", "--ct", ct2, "--identity", ident, "--attr-keys", k1, k2]) == 3
    assert "not authorized" in capsys.readouterr().err

    assert main(["attack1", "--identity", ident, "--attr-key", k1, "--ct", ct2, "--expect-hex", MSG]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1] == MSG and "plaintext match: match" in out

    assert main(["attack2", "--json", "--identity", ident, "--attr-key1", k1, "--attr-key2", k2, "--ct", ct2]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["plaintext"] == MSG and set(doc["intermediates"]) == {"B", "C", "unmasked_q"}


def test_game_command(capsys):
    assert main(["game", "--adversary", "attack1", "--trials", "100", "--seed", "cli-game"]) == 0
    assert "win_rate: 1.0" in capsys.readouterr().out.splitlines()


def test_usage_errors_exit_1(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["encrypt"])
    assert exc.value.code == 1
    assert main(["registry", "add-domain", "--registry", str(tmp_path / "r.json")]) == 1
    assert main(["game", "--adversary", "random", "--trials", "0", "--seed", "s"]) == 1


def test_validation_errors_exit_2(world, capsys):
    d, reg = world
    assert main(["encrypt", "--params", str(d / "params.habe"), "--policy", "(a1 &", "--registry", reg,
                 "--msg-hex", MSG, "--out", str(d / "x.habe")]) == 2
    assert "E_" in capsys.readouterr().err
    (d / "bad.habe").write_text("{")
    assert main(["decrypt", "--ct", str(d / "bad.habe"), "--identity", str(d / "bad.habe"),
                 "--attr-keys", str(d / "bad.habe")]) == 2
    assert main(["encrypt", "--params", str(d / "params.habe"), "--policy", "a1", "--registry", reg,
                 "--msg-hex", "abcd", "--out", str(d / "x.habe")]) == 2


def test_issuance_refused_exit_3(world):
    d, reg = world
    assert main(["create-user", "--dm", str(d / "dm2.habe"), "--user-pk", "ff", "--attr", "a3",
                 "--registry", reg, "--out", str(d)]) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cphabe", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "attack1" in proc.stdout
