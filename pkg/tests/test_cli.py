from amronet.cli import main
from amronet.experiments import read_csv

SCENARIO = """
name = "tiny"
replicates = 2
seeds = [0, 1]

[map]
bounds_m = [0, 0, 10, 10]

[sim]
r_c_m = 3.0

[[base_station]]
position_m = [0.5, 0.5]
"""


def test_patterns_command(capsys):
    assert main(["patterns", "rstrip", "--bounds", "0", "0", "32", "32", "--rc", "4"]) == 0
    out = capsys.readouterr().out
    assert "anchored 44" in out and "min_count 44" in out and "estimate 35" in out


def test_run_and_coverage_commands(tmp_path, capsys):
    scen = tmp_path / "tiny.toml"
    scen.write_text(SCENARIO)
    assert main(["run", str(scen), "--out-dir", str(tmp_path)]) == 0
    recs = read_csv(tmp_path / "tiny.csv")
    assert sorted(r.seed for r in recs) == [0, 1]
    svg = tmp_path / "snap.svg"
    assert main(["coverage", str(scen), "--seed", "1", "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    assert "coverage" in capsys.readouterr().out


def test_bad_scenario_reports_error(tmp_path, capsys):
    scen = tmp_path / "bad.toml"
    scen.write_text("[map]\nbounds_m = [0, 0, 1, 1]\nwhat = 1\n")
    assert main(["run", str(scen)]) == 2
    assert "unknown key" in capsys.readouterr().err


def test_preset_single_seed(tmp_path):
    out = tmp_path / "fig10.csv"
    assert main(["preset", "fig10", "--seed", "3", "--csv", str(out)]) == 0
    algos = {r.algo for r in read_csv(out)}
    assert algos == {"self_spreading", "potential", "dssa"}
