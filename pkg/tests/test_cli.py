import json
import subprocess
import sys

import pytest

from kronrho import cli
from kronrho.report import ANCHORS


def run_main(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_hilbert_json(capsys):
    code, out, _ = run_main(capsys, "hilbert", "--n", "3", "--cap-deg", "6", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "kronrho/1" and rep["passed"]
    dims = [c for c in rep["checks"] if c["paper_anchor"] == "hilbert-recurrence"][0]
    assert dims["numbers"]["eliminated"] == [1, 3, 8, 21, 55, 144, 377]


def test_every_anchor_is_registered(capsys):
    code, out, _ = run_main(capsys, "gamma", "--n", "2", "--cap-len", "4", "--json")
    assert code == 0
    for c in json.loads(out)["checks"]:
        assert c["paper_anchor"] in ANCHORS and c["status"] in ("pass", "fail", "inconclusive")


def test_qgr_tilting_pattern(capsys):
    code, out, _ = run_main(capsys, "qgr", "--n", "2", "--json")
    assert code == 0
    tilt = [c for c in json.loads(out)["checks"] if c["paper_anchor"] == "tilting-endomorphisms"]
    assert tilt[0]["numbers"]["dims"] == [1, 2, 0, 1]


def test_text_output(capsys):
    code, out, _ = run_main(capsys, "purity", "--n", "2", "--cap-len", "4")
    assert code == 0 and "checks passed" in out and "PASS" in out


@pytest.mark.parametrize("argv", [["hilbert", "--n", "1"], ["hilbert", "--field", "fp:9"],
                                  ["gamma", "--cap-len", "0"], ["nosuch"],
                                  ["torsion", "--module", "/nonexistent/file.json"]])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        sys.exit(cli.main(argv))
    assert exc.value.code == 2


def test_module_file_diagnostic_has_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,\n  "d0": 1 "d1": 1}')
    code, _, err = run_main(capsys, "torsion", "--module", str(bad))
    assert code == 2 and f"{bad}:2:11" in err


def test_module_file_shape_error(tmp_path, capsys):
    bad = tmp_path / "shape.json"
    bad.write_text('{"n": 2, "d0": 1, "d1": 1, "maps": [["1"], ["1", "2"]]}')
    code, _, err = run_main(capsys, "torsion", "--module", str(bad))
    assert code == 2 and "map 2" in err


def test_torsion_with_module_file(tmp_path, capsys):
    good = tmp_path / "m.json"
    good.write_text('{"n": 2, "d0": 1, "d1": 2, "maps": [[1, 0], [0, 1]]}')
    code, out, _ = run_main(capsys, "torsion", "--module", str(good), "--json", "--torsion-cap", "6")
    assert code == 0
    assert all(c["status"] == "pass" for c in json.loads(out)["checks"])


def test_failure_exit_code(monkeypatch, capsys):
    from kronrho.report import check
    monkeypatch.setitem(cli.COMMANDS, "hilbert",
                        lambda cfg: [check("forced", "determinism", False)])
    code, _, _ = run_main(capsys, "hilbert")
    assert code == 1


def test_json_is_deterministic(capsys):
    args = ["preinj", "--n", "2", "--seed", "42", "--json"]
    _, first, _ = run_main(capsys, *args)
    _, second, _ = run_main(capsys, *args)
    assert first == second


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "kronrho", "hilbert", "--n", "2", "--cap-deg", "5"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "hilbert" in res.stdout
