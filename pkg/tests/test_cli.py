import json

import numpy as np
import pytest

from spmulti.cli import RunConfig, main, parse_config, read_config_file


def load(path):
    return json.loads((path / "summary.json").read_text())


def without_metadata(path):
    data = load(path)
    data.pop("metadata")
    return json.dumps(data, sort_keys=True)


def test_hydrogen_mode(tmp_path):
    out = tmp_path / "h"
    assert main(["--mode", "hydrogen", "--out", str(out)]) == 0
    table = load(out)["results"]["table"]
    assert [row["n"] for row in table] == [1, 2, 3]
    assert table[0]["rel_error"] < 1e-4 and all(row["rel_error"] < 1e-3 for row in table)
    assert json.loads((out / "hypotheses.json").read_text())["all_pass"]


def test_verify_mode(tmp_path):
    out = tmp_path / "v"
    assert main(["--mode", "verify", "--out", str(out)]) == 0
    assert load(out)["results"]["all_passed"]


def test_solve_mode_writes_csv(tmp_path):
    out = tmp_path / "s"
    assert main(["--mode", "solve", "--out", str(out)]) == 0
    summary = load(out)
    assert summary["exit_status"] == 0
    sol = summary["results"]["solutions"][0]
    assert sol["converged"] and sol["below_threshold"]
    lines = (out / "solution_1.csv").read_text().splitlines()
    assert lines[0] == "r,u,phi" and len(lines) == 4001
    data = np.loadtxt(out / "solution_1.csv", delimiter=",", skiprows=1)
    assert data.shape == (4000, 3)
    # 17 significant digits round-trip doubles exactly
    assert np.array_equal(np.array([float(x) for x in lines[1].split(",")]), data[0])


def test_multiplicity_mode(tmp_path):
    out = tmp_path / "m"
    assert main(["--mode", "multiplicity", "--k-max", "3", "--out", str(out)]) == 0
    res = load(out)["results"]
    assert len(res["solutions"]) == 3
    dist = np.array(res["pairwise_l2_distance"])
    assert np.all(dist[~np.eye(3, dtype=bool)] > 1e-3)
    assert all((out / f"solution_{k}.csv").exists() for k in (1, 2, 3))


def test_minimax_mode(tmp_path):
    out = tmp_path / "mm"
    assert main(["--mode", "minimax", "--k-max", "2", "--out", str(out)]) == 0
    est = load(out)["results"]["estimates"]
    assert [e["k"] for e in est] == [1, 2] and all(e["passes"] for e in est)
    assert all(e["ray_upper_bound"]["holds"] for e in est)


def test_minimax_workers_match_serial(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--mode", "minimax", "--k-max", "2", "--out", str(a)]) == 0
    assert main(["--mode", "minimax", "--k-max", "2", "--set", "workers=2", "--out", str(b)]) == 0
    ra, rb = load(a)["results"], load(b)["results"]
    assert ra == rb


@pytest.mark.parametrize("argv,code", [
    (["--mode", "solve", "--omega", "0.1"], 2),
    (["--mode", "multiplicity", "--omega", "0.1"], 3),
    (["--mode", "minimax", "--omega", "0"], 3),
    (["--mode", "minimax", "--potential", "yukawa"], 3),
    (["--mode", "multiplicity", "--potential", "yukawa", "--k-max", "1"], 4),
    (["--set", "no_such_key=1"], 2),
    (["--set", "grid_n=abc"], 2),
    (["--set", "formats=xml"], 2),
    (["--mode", "hydrogen", "--potential", "zero"], 2),
])
def test_exit_codes(tmp_path, argv, code):
    assert main(argv + ["--out", str(tmp_path / "x")]) == code


def test_config_errors_leave_no_output(tmp_path):
    out = tmp_path / "never"
    assert main(["--mode", "solve", "--omega", "0.5", "--out", str(out)]) == 2
    assert not out.exists()


def test_unreadable_config(tmp_path):
    assert main(["--config", str(tmp_path / "missing.cfg")]) == 2


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a comment\nmode = hydrogen\ngrid_n = 2000  # inline\ncoupling = false\n"
                   "formats = json\n")
    values = read_config_file(cfg)
    assert values == {"mode": "hydrogen", "grid_n": "2000", "coupling": "false",
                      "formats": "json"}
    parsed, _ = parse_config(["--config", str(cfg), "--grid-n", "3000"])
    assert parsed.grid_n == 3000 and parsed.mode == "hydrogen"
    assert parsed.coupling is False and parsed.formats == ("json",)


def test_bad_config_line(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mode hydrogen\n")
    assert main(["--config", str(cfg)]) == 2


def test_summary_round_trip(tmp_path):
    first, second = tmp_path / "one", tmp_path / "two"
    assert main(["--mode", "hydrogen", "--grid-n", "2000", "--out", str(first)]) == 0
    assert main(["--config", str(first / "summary.json"), "--out", str(second)]) == 0
    a, b = load(first), load(second)
    a["config"].pop("out"), b["config"].pop("out")
    a.pop("metadata"), b.pop("metadata")
    assert a == b


def test_deterministic_json(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["--mode", "multiplicity", "--k-max", "2", "--seed", "3", "--out", str(out)]) == 0
    assert without_metadata(a).replace(str(a), "") == without_metadata(b).replace(str(b), "")
    assert (a / "solution_1.csv").read_bytes() == (b / "solution_1.csv").read_bytes()


def test_run_config_dict_round_trip():
    cfg = RunConfig(mode="minimax", k_max=4, formats=("json",))
    assert RunConfig().update(cfg.to_dict()) == cfg


def test_csv_only_output(tmp_path):
    out = tmp_path / "c"
    assert main(["--mode", "solve", "--set", "formats=csv", "--out", str(out)]) == 0
    assert (out / "solution_1.csv").exists() and not (out / "summary.json").exists()
