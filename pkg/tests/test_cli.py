import io
import json
import subprocess
import sys

import pytest

from tauplus.cli import main


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_info(capsys):
    code, out, _ = run(["info", "--q", "4"], capsys)
    rec = json.loads(out)
    assert code == 0
    assert rec["moduli"] == [512, 23, 25]
    assert (rec["dr"], rec["mu1"], rec["mu2"]) == (294400, 73, 12)
    code, out, _ = run(["info", "--q", "8", "--string-numbers"], capsys)
    assert json.loads(out)["moduli"] == ["131072", "383", "385"]


def test_info_bad_q(capsys):
    code, _, err = run(["info", "--q", "2"], capsys)
    assert code == 2 and "q" in err


def test_forward_reverse(capsys, monkeypatch):
    code, out, _ = run(["forward", "--q", "4", "100000"], capsys)
    assert code == 0
    assert out.strip() == '{"q":4,"x1":160,"x2":19,"x3":0}'
    code, out2, _ = run(["reverse", "--q", "4", "-"], capsys, stdin=out, monkeypatch=monkeypatch)
    assert (code, out2.strip()) == (0, "100000")
    assert run(["reverse", "--q", "4", "160", "19", "0"], capsys)[1].strip() == "100000"
    assert run(["reverse", "--q", "4", "0", "0", "0"], capsys)[1].strip() == "0"


def test_reverse_string_record(capsys, monkeypatch):
    code, out, _ = run(["forward", "--q", "9", "123456789", "--string-numbers"], capsys)
    assert json.loads(out)["x1"] == str(123456789 % 2**19)
    code, out2, _ = run(["reverse", "--q", "9", "-"], capsys, stdin=out, monkeypatch=monkeypatch)
    assert out2.strip() == "123456789"


@pytest.mark.parametrize("path", ["functional", "eq9", "matrix"])
def test_reverse_paths(capsys, path):
    code, out, _ = run(["reverse", "--q", "9", "5", "6", "7", "--path", path], capsys)
    assert code == 0 and out.strip() == "212374913029"


@pytest.mark.parametrize("argv", [
    ["reverse", "--q", "4", "1", "2", "3", "--path", "eq9"],
    ["reverse", "--q", "4", "512", "0", "0"],
    ["reverse", "--q", "4", "1", "2"],
    ["forward", "--q", "4", "294400"],
    ["forward", "--q", "4", "abc"],
    ["verify", "--q", "9", "--mode", "exhaustive"],
    ["matrix", "--q", "8"],
    ["schedule", "--q", "8"],
])
def test_usage_errors(capsys, argv):
    assert run(argv, capsys)[0] == 2


def test_argparse_error_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["info"])
    assert e.value.code == 2


def test_verify_exhaustive(capsys):
    code, out, _ = run(["verify", "--q", "4", "--mode", "exhaustive", "--workers", "1"], capsys)
    assert code == 0
    assert "294400/294400 pass" in out


def test_verify_sample(capsys):
    code, out, _ = run(["verify", "--q", "9", "-n", "2000", "--seed", "7", "--workers", "1"], capsys)
    assert code == 0 and "roundtrip: 2000/2000 pass" in out


def test_matrix(capsys):
    code, out, _ = run(["matrix", "--q", "9"], capsys)
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert code == 0 and len(rows) == 13
    assert all(len(r.split()) == 19 for r in rows)


def test_perf(capsys):
    code, out, _ = run(["perf", "--q", "4,8,16,32"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 5
    assert lines[-1] == "32,44,129,14,42,15,87"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "tauplus", "info", "--q", "3"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["dr"] == 18304
