import json
import subprocess
import sys

import pytest

from odometer.cli import main
from odometer.machine import a_portrait, a_power_portrait
from odometer.portrait import portrait_from_json, portrait_inverse, portrait_to_json
from test_portrait import check_dot


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_padic_commands(capsys):
    assert run(capsys, "padic", "add", "int:-1", "int:1", "--p", "2", "--precision", "4")[:2] == (
        0,
        "0,0,0,0 (base 2)\n",
    )
    assert run(capsys, "padic", "neg", "int:0", "--p", "5", "--precision", "3")[1] == "0,0,0 (base 5)\n"
    assert run(capsys, "padic", "dist", "int:6", "int:2", "--p", "2", "--precision", "8")[1] == "1/p^2\n"
    assert run(capsys, "padic", "sub", "1,0,0", "2,0,0", "--p", "3")[1] == "2,2,2 (base 3)\n"
    assert run(capsys, "padic", "order", "0,0,1,2", "--p", "3")[1] == "2\n"
    assert run(capsys, "padic", "order", "int:0", "--p", "3", "--precision", "2")[1] == "beyond precision\n"
    assert run(capsys, "padic", "dist", "int:5", "int:5", "--p", "3", "--precision", "2")[1] == "<= 1/p^2\n"


def test_padic_json(capsys):
    code, out, _ = run(capsys, "padic", "add", "int:3", "int:4", "--p", "2", "--precision", "4", "--output", "json")
    assert json.loads(out) == {"p": 2, "precision": 4, "digits": [1, 1, 1, 0]}
    _, out, _ = run(capsys, "padic", "dist", "int:6", "int:2", "--p", "2", "--precision", "8", "--output", "json")
    assert json.loads(out)["distance"] == {"kind": "exact", "k": 2}


@pytest.mark.parametrize(
    "argv",
    [
        ["padic", "add", "int:1", "--p", "2", "--precision", "3"],
        ["padic", "add", "1,0", "1,0 (base 3)", "--p", "2"],
        ["padic", "add", "int:1", "int:1", "--p", "2"],
        ["padic", "add", "int:1", "int:1", "--p", "4", "--precision", "3"],
        ["padic", "add", "x", "int:1", "--p", "2", "--precision", "3"],
        ["padic", "neg", "int:1", "--p", "2", "--precision", "3", "--output", "dot"],
        ["orbit", "1", "012", "--p", "2"],
        ["a-power", "3", "--p", "2"],
        ["verify", "all", "--cases", "0"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("odometer: error:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_allow_composite(capsys):
    code, out, _ = run(capsys, "padic", "add", "int:5", "int:5", "--p", "4", "--precision", "3", "--allow-composite")
    assert code == 0 and out == "2,2,0 (base 4)\n"


def test_orbit(capsys):
    assert run(capsys, "orbit", "1", "111", "--p", "2")[1] == "000\n"
    assert run(capsys, "orbit", "0", "012", "--p", "3")[1] == "012\n"
    assert run(capsys, "orbit", "-1", "000", "--p", "2")[1] == "111\n"


def test_phi_dot_reproduces_inverse_portrait(capsys):
    code, out, _ = run(capsys, "phi", "int:-1", "--p", "2", "--depth", "4", "--output", "dot")
    assert code == 0
    check_dot(out)
    for spine in ["", "0", "00", "000"]:
        assert f'"v{spine}" [label="(01)"];' in out
    for right in ["1", "01", "001", "10", "11"]:
        assert f'"v{right}" [label="1"];' in out


def test_phi_text_and_json(capsys):
    _, out, _ = run(capsys, "phi", "int:0", "--p", "3", "--depth", "3")
    lines = out.splitlines()
    assert lines[0] == "portrait p=3 depth=3"
    assert len(lines) == 1 + 13 and all(line.endswith("\t1") for line in lines[1:])
    _, phi_json, _ = run(capsys, "phi", "2,0,1", "--p", "3", "--depth", "3", "--output", "json")
    _, power_json, _ = run(capsys, "a-power", "11", "--p", "3", "--depth", "3", "--output", "json")
    assert phi_json == power_json
    assert portrait_from_json(phi_json) == a_power_portrait(11, 3, 3)


def test_recognize(capsys, tmp_path):
    ident = tmp_path / "ident.json"
    ident.write_text(json.dumps(portrait_to_json(a_power_portrait(0, 3, 3))))
    assert run(capsys, "recognize", str(ident), "--p", "3")[1] == "0,0,0 (base 3)\n"

    inv = tmp_path / "inv.json"
    inv.write_text(json.dumps(portrait_to_json(portrait_inverse(a_portrait(2, 4)))))
    assert run(capsys, "recognize", str(inv))[1] == "1,1,1,1 (base 2)\n"
    _, out, _ = run(capsys, "recognize", str(inv), "--output", "json")
    assert json.loads(out) == {"in_closure": True, "p": 2, "precision": 4, "digits": [1, 1, 1, 1]}

    obj = portrait_to_json(portrait_inverse(a_portrait(2, 4)))
    obj["perms"]["01"] = [1, 0] if obj["perms"]["01"] == [0, 1] else [0, 1]
    edited = tmp_path / "edited.json"
    edited.write_text(json.dumps(obj))
    assert run(capsys, "recognize", str(edited))[:2] == (0, "not in closure\n")

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(capsys, "recognize", str(broken))[0] == 2
    assert run(capsys, "recognize", str(tmp_path / "missing.json"))[0] == 2


def test_json_round_trip_through_cli(capsys, tmp_path):
    for n in (0, 1, -1, 37):
        _, out, _ = run(capsys, "a-power", str(n), "--p", "3", "--depth", "4", "--output", "json")
        g = portrait_from_json(out)
        assert g == a_power_portrait(n, 3, 4)
        path = tmp_path / f"{n}.json"
        path.write_text(out)
        assert run(capsys, "recognize", str(path), "--p", "3")[1] == str(
            __import__("odometer").padic_from_int(n, 3, 4)
        ) + "\n"


def test_verify_small(capsys):
    code, out, _ = run(capsys, "verify", "stabilizer", "--p", "3", "--depth", "5")
    assert code == 0 and "stabilizer    PASS" in out and out.endswith("overall       PASS\n")
    code, out, _ = run(capsys, "verify", "isometry", "--p", "2", "--depth", "1", "--cases", "1")
    assert code == 0 and "isometry      PASS  1/1 passed" in out


def test_verify_deterministic(capsys, monkeypatch):
    argv = ["verify", "all", "--p", "3", "--depth", "4", "--cases", "10", "--output", "json"]
    first = run(capsys, *argv, "--seed", "5")[1]
    second = run(capsys, *argv, "--seed", "5")[1]
    assert first == second
    report = json.loads(first)
    assert report["ok"] and report["config"]["seed"] == 5
    assert [s["name"] for s in report["suites"]][:3] == ["oracle", "wreath", "distance"]
    monkeypatch.setenv("ODOMETER_SEED", "5")
    assert run(capsys, *argv)[1] == first
    monkeypatch.setenv("ODOMETER_SEED", "five")
    assert run(capsys, *argv)[0] == 2


def test_verify_failure_exit_code(capsys, monkeypatch):
    from odometer import verify

    def broken(p, depth, cases, rng):
        res = verify.SuiteResult("oracle")
        res.check(False, "forced")
        return res

    monkeypatch.setitem(verify.SUITES, "oracle", broken)
    code, out, _ = run(capsys, "verify", "oracle")
    assert code == 1 and "FAIL" in out and "forced" in out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "odometer", "orbit", "1", "111", "--p", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and proc.stdout == "000\n"
