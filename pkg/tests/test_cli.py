import json

from click.testing import CliRunner

from bellgeo.cli import main

runner = CliRunner()


def test_help():
    res = runner.invoke(main, ["--help"])
    assert res.exit_code == 0
    for cmd in ("sample", "distance", "histogram", "volume", "norms",
                "cycle-analytic", "reproduce"):
        assert cmd in res.output


def test_sample_stdout():
    res = runner.invoke(main, ["sample", "--scenario", "2m2", "--m", "2",
                               "--framework", "full", "--method", "iid",
                               "--samples", "3", "--seed", "7"])
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0].startswith("# ")
    assert lines[1] == "sample_index,coord_0,coord_1,coord_2,coord_3"
    assert len(lines) == 5


def test_distance_csv_header():
    res = runner.invoke(main, ["distance", "--scenario", "cycle", "--n", "2",
                               "--framework", "full", "--method", "iid",
                               "--samples", "4", "--seed", "1"])
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0] == "# scenario: cycle-2/full"
    assert lines[1].startswith("# eps: ")
    assert lines[2] == "# seed: 1"
    assert lines[3] == "sample_index,nl"
    assert len(lines) == 8


def test_volume_json():
    res = runner.invoke(main, ["volume", "--scenario", "2m2", "--m", "2",
                               "--framework", "full", "--method", "iid",
                               "--samples", "1000", "--seed", "1", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["n_samples"] == 1000
    assert 0.6 < doc["local_fraction"] < 0.75
    assert doc["spec"]["scenario_kind"] == "2m2"


def test_histogram_out_file(tmp_path):
    out = tmp_path / "h.csv"
    res = runner.invoke(main, ["histogram", "--scenario", "2m2", "--m", "2",
                               "--framework", "full", "--method", "iid",
                               "--samples", "300", "--seed", "1",
                               "--out", str(out)])
    assert res.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# spec: ")
    assert lines[2] == "bin_index,bin_lo,bin_hi,count"


def test_cycle_analytic_csv():
    res = runner.invoke(main, ["cycle-analytic", "--n", "4"])
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0] == "n,pyramid_volume,local_ratio"
    assert len(lines) == 4
    n, vol, ratio = lines[1].split(",")
    assert n == "2" and abs(float(ratio) - 2 / 3) < 1e-12


def test_norms_csv():
    res = runner.invoke(main, ["norms", "--m", "2", "--samples", "15",
                               "--seed", "0"])
    assert res.exit_code == 0
    lines = res.output.splitlines()
    assert lines[0] == "m,n_samples,frac_pi_le_1,frac_gamma2_le_1,median_ratio,mean_flatness"
    assert lines[1].startswith("2,15,")


def test_config_file_with_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scenario_kind": "2m2", "framework": "full", "m": 2,
        "method": "iid", "n_samples": 50, "seed": 3,
    }))
    res = runner.invoke(main, ["volume", "--config", str(cfg), "--samples",
                               "200", "--json"])
    assert res.exit_code == 0
    assert json.loads(res.output)["n_samples"] == 200


def test_invalid_config_exit_2():
    # missing scenario
    assert runner.invoke(main, ["volume"]).exit_code == 2
    # missing family parameter
    assert runner.invoke(main, ["volume", "--scenario", "22d"]).exit_code == 2
    # iid sampling on a non-box polytope
    res = runner.invoke(main, ["volume", "--scenario", "2m2", "--m", "2",
                               "--framework", "complete", "--method", "iid",
                               "--samples", "10"])
    assert res.exit_code == 2
    # malformed config file
    bad = runner.invoke(main, ["volume", "--config", "/dev/null"])
    assert bad.exit_code == 2


def test_reproduce_cycle_analytic_exit_0():
    res = runner.invoke(main, ["reproduce", "cycle-analytic"])
    assert res.exit_code == 0
    assert "PASS" in res.output


def test_reproduce_scaled_json():
    res = runner.invoke(main, ["reproduce", "V", "--scale", "0.002", "--json"])
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["table"] == "V"
    assert len(doc["rows"]) == 2
