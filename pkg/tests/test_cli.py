import json
import math
import subprocess
import sys
from fractions import Fraction

import pytest

from ppsolve.cli import CliConfig, InputError, certified_digits, main, truncate_decimal
from ppsolve.textio import parse_system

from instances import A_TEXT, B_TEXT, C_TEXT, E_TEXT

BMDP = """\
type T
action a
1/2 -> T T
1/2 -> ()
action b
1/3 -> T
2/3 -> ()
"""


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("a.pps", A_TEXT), ("b.pps", B_TEXT.format(op="max")), ("c.pps", C_TEXT),
                       ("e.pps", E_TEXT), ("t.bmdp", BMDP), ("bad.pps", "x1 = 0.6*x1 + 0.6\n"),
                       ("cube.pps", "x = max(1/2*x*x*x + 1/4, 0.3)\n")]:
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_digit_helpers():
    assert certified_digits(20) == 7
    assert certified_digits(10) == math.ceil(10 * math.log10(2))
    assert truncate_decimal(Fraction(2, 3), 3) == "0.666"
    assert truncate_decimal(Fraction(1), 2) == "1.00"


def test_solve_human(files, capsys):
    code, out, _ = _run(capsys, "solve", "--j", "20", files["a.pps"])
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("x1 ≈ 0.3333333")
    assert len(first.split("≈ ")[1].split(".")[1]) == 7


def test_solve_exact_and_json(files, capsys):
    code, out, _ = _run(capsys, "solve", "--j", "12", "--exact", "--format", "json", files["a.pps"])
    doc = json.loads(out)
    assert code == 0
    assert abs(Fraction(doc["values"]["x1"]) - Fraction(1, 3)) <= Fraction(1, 2 ** 12)


def test_solve_differential(files, capsys):
    code, out, _ = _run(capsys, "solve", "--differential-lp", "--format", "json", files["a.pps"])
    assert code == 0 and json.loads(out)["differential"] == "agree"


def test_qualitative_json_round_trips(files, capsys):
    code, out, _ = _run(capsys, "qualitative", files["c.pps"], "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["zero"] == ["x1"] and doc["one"] == ["x2"]
    assert parse_system(doc["reduced"]).n == 0
    code, out, _ = _run(capsys, "qualitative", files["b.pps"], "--format", "json")
    reduced = json.loads(out)["reduced"]
    assert parse_system(reduced) == parse_system(B_TEXT.format(op="max"))


def test_policy_json(files, capsys):
    code, out, _ = _run(capsys, "policy", "--epsilon", "1/1024", files["b.pps"], "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["policy"] == {"x1": "x3"}
    assert doc["certificate"]["kind"] == "sound"


def test_policy_override(files, capsys):
    code, out, _ = _run(capsys, "policy", "--override-precision", "30", files["b.pps"])
    assert code == 0 and "heuristic" in out


def test_bssg(files, capsys):
    code, out, _ = _run(capsys, "bssg", files["e.pps"], "--format", "json")
    doc = json.loads(out)
    assert doc["sigma"] == {"x1": "x2"} and doc["tau"] == {"x2": "x4"}
    assert doc["values"]["x1"].startswith("0.333")


def test_convert_and_normalize(files, capsys):
    code, out, _ = _run(capsys, "convert", files["t.bmdp"])
    assert code == 0
    assert parse_system(out).flavor == "max"
    code, out, _ = _run(capsys, "normalize", files["cube.pps"])
    assert parse_system(out).is_snf()


@pytest.mark.parametrize("argv", [
    ["solve", "missing.pps"],
    ["solve", "--j", "0", "a.pps"],
    ["solve", "--epsilon", "3/2", "a.pps"],
    ["frobnicate", "a.pps"],
])
def test_input_errors_exit_one(argv, files, capsys):
    argv = [files.get(a, a) for a in argv]
    code, _, err = _run(capsys, *argv)
    assert code == 1


def test_parse_error_is_one_line(files, capsys):
    code, _, err = _run(capsys, "solve", files["bad.pps"])
    assert code == 1
    assert err.startswith("error: input:") and err.count("\n") == 1


def test_mixed_system_refused_by_solve(files, capsys):
    code, _, err = _run(capsys, "solve", "--flavor", "maxmin", files["e.pps"])
    assert code == 1 and "bssg" in err


def test_internal_error_exits_two(files, capsys, monkeypatch):
    import ppsolve.cli as cli
    from ppsolve.gnm import GnmInvariantError

    def boom(*a, **k):
        raise GnmInvariantError("bad")
    monkeypatch.setattr(cli, "solve", boom)
    code, _, err = _run(capsys, "solve", files["a.pps"])
    assert code == 2 and err.startswith("error: internal:")


def test_config_validation():
    with pytest.raises(InputError):
        CliConfig("solve", "x", j=0)


def test_console_entry_point(files):
    res = subprocess.run([sys.executable, "-m", "ppsolve.cli", "solve", files["a.pps"]],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "x1" in res.stdout
