import json
import math

import numpy as np
import pytest

from circpc.cli import main
from circpc.distributions import Dataset, DistributionSpec, Family, sample
from circpc.divergence import BaseModel, distance, distance_deriv, profile_for
from circpc.pc_priors import PcPrior, pc_cdf, pc_pdf


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestCalibrate:
    def test_round_trip_statement(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["calibrate", "--family", "wc", "--U", "0.6", "--alpha", "0.3"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "numeric"
        assert payload["lambda"] == pytest.approx(0.27319749431596657, rel=1e-10)
        assert payload["roundtrip_alpha"] == pytest.approx(0.3, abs=1e-8)

    def test_paper_method(self, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "calibrate", "--family", "vm", "--base", "pointmass",
                "--U", str(math.pi / 2.0), "--alpha", "0.3", "--method", "paper",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["method"] == "closed_form"
        assert payload["lambda"] == pytest.approx(0.8182367749253235, rel=1e-10)

    def test_infeasible_alpha_fails_with_range(self, capsys):
        code, out, err = run_cli(
            capsys,
            [
                "calibrate", "--family", "cardioid", "--base", "uniform",
                "--U", "0.5", "--alpha", "0.9",
            ],
        )
        assert code == 1
        assert out == ""
        assert "attainable" in err

    def test_missing_required_flag_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["calibrate", "--family", "wc", "--U", "0.6"])
        assert exc_info.value.code == 2

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "lam.json"
        code, out, _ = run_cli(
            capsys,
            [
                "calibrate", "--family", "wc", "--U", "0.6", "--alpha", "0.3",
                "--out", str(path),
            ],
        )
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["lambda"] > 0.0


class TestPcDensity:
    def test_csv_matches_library(self, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "pc-density", "--family", "wc", "--base", "uniform",
                "--lambda", "1.0", "--grid", "0.05:0.95:7",
            ],
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,pdf,cdf"
        prior = PcPrior("wc", "uniform", 1.0)
        grid = np.linspace(0.05, 0.95, 7)
        assert len(lines) == 8
        for line, x in zip(lines[1:], grid):
            p, d, c = (float(v) for v in line.split(","))
            assert p == pytest.approx(x, rel=1e-15)
            assert d == pytest.approx(pc_pdf(prior, x), rel=1e-15)
            assert c == pytest.approx(pc_cdf(prior, x), rel=1e-15)

    def test_bad_grid_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main([
                "pc-density", "--family", "wc", "--base", "uniform",
                "--lambda", "1.0", "--grid", "oops",
            ])
        assert exc_info.value.code == 2


class TestDistance:
    def test_scalar_json(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["distance", "--family", "vm", "--base", "uniform", "--param", "3.0"],
        )
        assert code == 0
        payload = json.loads(out)
        prof = profile_for(Family.VON_MISES, BaseModel.UNIFORM)
        assert payload["distance"] == pytest.approx(float(distance(prof, 3.0)), rel=1e-14)
        assert payload["derivative"] == pytest.approx(
            float(distance_deriv(prof, 3.0)), rel=1e-14
        )

    def test_grid_csv(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["distance", "--family", "cardioid", "--base", "uniform", "--grid", "0.05:0.45:5"],
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,distance,derivative"
        assert len(lines) == 6


class TestAudit:
    def test_reference_prior_json(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["audit", "--prior", "h2", "--profile", "vm:uniform"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["classification"] == "base_model_favoring"
        assert payload["density_at_zero"] == pytest.approx(4.0 / math.pi, rel=1e-6)
        assert payload["monotone_decreasing"] is True

    def test_pc_prior_needs_lambda(self, capsys):
        code, out, err = run_cli(
            capsys,
            ["audit", "--prior", "pc", "--profile", "vm:pointmass"],
        )
        assert code == 1
        assert "lambda" in err

    def test_pc_prior_with_lambda(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["audit", "--prior", "pc", "--lambda", "1.3", "--profile", "vm:pointmass"],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["classification"] == "base_model_favoring"


class TestRefDensity:
    def test_parameter_scale(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["ref-density", "--prior", "gamma", "--hypers", "2.0", "--grid", "0.5:2:4"],
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "param,pdf"
        vals = [float(l.split(",")[1]) for l in lines[1:]]
        assert vals[0] == pytest.approx(2.0 * math.exp(-1.0), rel=1e-12)

    def test_distance_scale(self, capsys):
        code, out, _ = run_cli(
            capsys,
            [
                "ref-density", "--prior", "beta", "--hypers", "2.0", "3.0",
                "--grid", "0.1:1.0:5", "--profile", "wc:uniform",
            ],
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "d,pdf"
        assert len(lines) == 6
        assert all(float(l.split(",")[1]) > 0.0 for l in lines[1:])


class TestSample:
    def test_writes_loadable_dataset(self, capsys, tmp_path):
        path = tmp_path / "draws.csv"
        code, out, _ = run_cli(
            capsys,
            [
                "sample", "--family", "vm", "--mu", "1.0",
                "--concentration", "2.0", "--n", "50", "--seed", "4",
                "--out", str(path),
            ],
        )
        assert code == 0
        data = Dataset.load_csv(path)
        assert len(data) == 50
        reference = sample(DistributionSpec(Family.VON_MISES, 1.0, 2.0), 50, seed=4)
        assert np.array_equal(data.angles, reference.angles)

    def test_seed_required(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["sample", "--family", "uniform", "--n", "10"])
        assert exc_info.value.code == 2


class TestFit:
    @pytest.fixture()
    def angle_file(self, tmp_path):
        data = sample(DistributionSpec(Family.VON_MISES, math.pi, 2.0), 40, seed=14)
        path = tmp_path / "angles.csv"
        data.save_csv(path)
        return path

    def test_end_to_end(self, capsys, tmp_path, angle_file):
        chain_path = tmp_path / "chain.csv"
        code, out, _ = run_cli(
            capsys,
            [
                "fit", "--family", "vm", "--data", str(angle_file),
                "--prior", "pc-uniform", "--U", str(math.pi / 2.0),
                "--alpha", "0.5", "--iterations", "2500", "--burn-in", "1000",
                "--seed", "3", "--chain-out", str(chain_path),
            ],
        )
        assert code == 0
        payload = json.loads(out)
        for key in (
            "concentration_mean",
            "concentration_ci_low",
            "concentration_ci_high",
            "mu_circular_mean",
            "effective_sample_size",
            "n",
            "prior",
            "lambda",
            "acceptance_rates",
            "chain_csv",
        ):
            assert key in payload, key
        assert payload["n"] == 40
        assert 0.3 <= payload["concentration_mean"] <= 6.0
        assert chain_path.exists()
        lines = chain_path.read_text().strip().split("\n")
        assert lines[0] == "iter,mu,concentration"
        assert len(lines) == 1 + 1500

    def test_alpha_from_data(self, capsys, angle_file):
        code, out, _ = run_cli(
            capsys,
            [
                "fit", "--family", "vm", "--data", str(angle_file),
                "--prior", "pc-uniform", "--U", str(math.pi / 2.0),
                "--alpha-from-data", "--center", "mean",
                "--iterations", "2500", "--burn-in", "1000", "--seed", "3",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert 0.0 < payload["alpha"] < 1.0
        assert payload["lambda"] > 0.0

    def test_reference_prior_fit(self, capsys, angle_file):
        code, out, _ = run_cli(
            capsys,
            [
                "fit", "--family", "vm", "--data", str(angle_file),
                "--prior", "gamma", "--hypers", "1.0",
                "--iterations", "2500", "--burn-in", "1000", "--seed", "3",
            ],
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["prior"] == "gamma"

    def test_missing_data_file_fails(self, capsys, tmp_path):
        code, out, err = run_cli(
            capsys,
            [
                "fit", "--family", "vm", "--data", str(tmp_path / "nope.csv"),
                "--prior", "h2", "--iterations", "2500", "--burn-in", "1000",
                "--seed", "3",
            ],
        )
        assert code == 1
        assert err.startswith("error:")


class TestSimulate:
    def test_json_config(self, capsys, tmp_path):
        config = {
            "family": "vm",
            "truths": [1.0],
            "sample_sizes": [30],
            "replicates": 2,
            "priors": [
                {"kind": "gamma", "hypers": [1.0]},
                {"kind": "pc_uniform", "hypers": [0.5], "U": math.pi / 2.0},
            ],
            "mcmc": {"iterations": 2000, "burn_in": 1000},
        }
        cfg_path = tmp_path / "study.json"
        cfg_path.write_text(json.dumps(config))
        out_path = tmp_path / "result.csv"
        code, out, _ = run_cli(
            capsys,
            [
                "simulate", "--config", str(cfg_path), "--seed", "99",
                "--out", str(out_path),
            ],
        )
        assert code == 0
        lines = out_path.read_text().strip().split("\n")
        assert lines[0] == "prior,hyper,truth,N,post_mean_avg,post_mean_sd,cells_failed"
        assert len(lines) == 3
        assert lines[1].startswith("gamma,1.0,1.0,30,")

    def test_seed_required(self, capsys, tmp_path):
        cfg_path = tmp_path / "study.json"
        cfg_path.write_text("{}")
        with pytest.raises(SystemExit) as exc_info:
            main(["simulate", "--config", str(cfg_path)])
        assert exc_info.value.code == 2
