import json
import subprocess
import sys

import pytest

from dtseries.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


XI = {"gram": [[0, 1], [1, 0]], "nu_bar": ["1/3", "1/2"], "c": [["1", "-1"]],
      "c_prime": [["1", "0"]], "alpha": []}


def test_compute_rank_one(capsys):
    code, out, _ = run(capsys, "compute", "--rank", "1", "--c1", "0", "--order", "8", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    rows = {d: v for d, v in doc["rows"] if v != "0"}
    assert rows == {0: "1", 2: "3", 4: "9", 6: "22", 8: "51"}
    assert (doc["r"], doc["l"], doc["order"]) == (1, 0, 8)


def test_compute_rank_two(capsys):
    code, out, _ = run(capsys, "compute", "--rank", "2", "--c1", "1", "--order", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["delta,dt", "0,0", "1,0", "2,0", "3,1"]


def test_formats_agree(capsys):
    base = ["compute", "--rank", "2", "--c1", "0", "--order", "4"]
    _, js, _ = run(capsys, *base, "--format", "json")
    _, cs, _ = run(capsys, *base, "--format", "csv")
    _, tx, _ = run(capsys, *base, "--format", "text")
    from_json = [[str(d), v] for d, v in json.loads(js)["rows"]]
    from_csv = [line.split(",") for line in cs.splitlines()[1:]]
    from_text = [line.split() for line in tx.splitlines()[2:]]
    assert from_json == from_csv == from_text


def test_json_output_is_deterministic_across_worker_counts(capsys, tmp_path):
    base = ["compute", "--rank", "3", "--c1", "1", "--order", "6", "--format", "json"]
    _, one, _ = run(capsys, *base)
    _, two, _ = run(capsys, *base, "--jobs", "2")
    assert one == two


def test_raw_and_evaluate_flags(capsys):
    code, out, _ = run(capsys, "compute", "--rank", "2", "--c1", "1", "--order", "3", "--raw", "--evaluate")
    assert code == 0
    assert "3/4" in out and "-1" in out
    assert "value at tau = i" in out


@pytest.mark.parametrize("argv", [
    ["compute", "--rank", "0", "--c1", "1", "--order", "2"],
    ["compute", "--rank", "5", "--c1", "1", "--order", "2"],
    ["compute", "--rank", "2", "--c1", "1", "--order", "-1"],
    ["compute", "--rank", "2", "--c1", "1", "--order", "2", "--jobs", "0"],
    ["compute", "--rank", "2"],
    ["nonsense"],
])
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as info:
        code = main(argv)
        raise SystemExit(code)
    assert info.value.code == 1


def test_theta_worked_example(capsys, tmp_path):
    path = tmp_path / "xi.json"
    path.write_text(json.dumps(XI))
    code, out, _ = run(capsys, "theta", str(path), "--prec", "1", "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"] == [["1/3", "2"], ["2/3", "-2"], ["5/6", "2"]]
    code, out, _ = run(capsys, "theta", str(path), "--prec", "2", "--oracle")
    assert code == 0 and "MATCH" in out and "MISMATCH" not in out


def test_theta_validation_failure(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(dict(XI, nu_bar=["0", "0"])))
    code, _, err = run(capsys, "theta", str(path))
    assert code == 2
    assert "(iv)" in err
    garbage = tmp_path / "garbage.json"
    garbage.write_text("[1, 2")
    assert run(capsys, "theta", str(garbage))[0] == 2


def test_joyce_command(capsys):
    code, out, _ = run(capsys, "joyce", "1:0,2", "1:0,-1", "--format", "json")
    assert code == 0
    assert json.loads(out)["rows"] == [["S", "-1"], ["U", "-1/2"]]
    assert run(capsys, "joyce", "1:0")[0] == 1


def test_cache_dir_from_environment(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("DTSERIES_CACHE_DIR", str(tmp_path))
    assert run(capsys, "compute", "--rank", "2", "--c1", "1", "--order", "3")[0] == 0
    assert (tmp_path / "dt_r2_l1.json").exists()


def test_corrupt_cache_is_a_validation_error(capsys, tmp_path):
    (tmp_path / "dt_r2_l1.json").write_text("{broken")
    code, _, err = run(capsys, "compute", "--rank", "2", "--c1", "1", "--order", "3", "--cache-dir", str(tmp_path))
    assert code == 2


def test_selftest_quick_with_corrupt_cache(capsys, tmp_path):
    (tmp_path / "dt_r2_l1.json").write_text("{broken")
    code, out, _ = run(capsys, "selftest", "--quick", "--cache-dir", str(tmp_path))
    assert code == 2
    lines = [l for l in out.splitlines() if l.startswith("[")]
    failed = [l for l in lines if "[FAIL" in l]
    assert len(failed) == 1 and "cache" in failed[0]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dtseries", "joyce", "1:0,2", "1:1,-1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "-1" in proc.stdout
