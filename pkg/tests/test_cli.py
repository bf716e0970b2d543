"""End-to-end subcommand tests: reports, exit codes, determinism."""

import json

import numpy as np
import pytest

from combexit.cli import (
    EXIT_INCONCLUSIVE,
    EXIT_OK,
    EXIT_USAGE,
    run_command,
)

STRIP = {"type": "vertical_strip", "left": -1.0, "right": 1.0}
UNIFORM_COMB = {
    "type": "comb",
    "spec": {
        "generator": {"kind": "uniform", "spacing": 1.0, "height": 1.0},
        "window_radius": 24,
        "one_sided": False,
    },
}


def write_json(path, payload):
    path.write_text(json.dumps(payload) + "\n", encoding="utf-8")
    return str(path)


def load(path):
    return json.loads(path.read_text(encoding="utf-8"))


class TestScalarCommands:
    def test_theta0_square_value(self, tmp_path):
        out = tmp_path / "r.json"
        assert run_command(["theta0", "--ell", "1", "--out", str(out)]) == EXIT_OK
        report = load(out)
        assert report["theta0"] == pytest.approx(0.75, abs=1e-12)
        assert report["schema_version"] == "1"
        assert report["config"]["arguments"]["ell"] == 1.0

    def test_strip_moment_second(self, tmp_path):
        out = tmp_path / "r.json"
        code = run_command(["strip-moment", "--p", "2", "--out", str(out)])
        assert code == EXIT_OK
        assert load(out)["moment"] == pytest.approx(5.0 / 3.0, abs=1e-10)

    def test_check_uniform_comb_all_moments(self, tmp_path):
        comb = write_json(tmp_path / "uniform.json", UNIFORM_COMB)
        out = tmp_path / "r.json"
        code = run_command(["check", "--comb", comb, "--p", "3", "--out", str(out)])
        assert code == EXIT_OK
        report = load(out)
        assert report["status"] == "FiniteCertified"
        assert report["bound_on_moment_root"] > 0.0
        assert comb in report["config"]["inputs"]


class TestSimulate:
    def test_same_seed_gives_identical_csv_bytes(self, tmp_path):
        domain = write_json(tmp_path / "strip.json", STRIP)
        csvs = []
        for tag in ("a", "b"):
            out = tmp_path / f"{tag}.json"
            csv = tmp_path / f"{tag}.csv"
            code = run_command(
                [
                    "simulate", "--domain", domain, "--start", "0,0",
                    "--n", "2000", "--engine", "WosTime", "--seed", "9",
                    "--out", str(out), "--csv", str(csv),
                ]
            )
            assert code == EXIT_OK
            csvs.append(csv.read_bytes())
        assert csvs[0] == csvs[1]

    def test_report_carries_resolved_params_and_fingerprints(self, tmp_path):
        domain = write_json(tmp_path / "strip.json", STRIP)
        out = tmp_path / "r.json"
        csv = tmp_path / "s.csv"
        run_command(
            [
                "simulate", "--domain", domain, "--start", "0,0",
                "--n", "500", "--engine", "EulerBridge", "--seed", "1",
                "--out", str(out), "--csv", str(csv),
            ]
        )
        report = load(out)
        # default step: (strip half-width)^2 / 25
        assert report["resolved_params"]["step_h"] == pytest.approx(1.0 / 25.0)
        assert report["n"] == 500
        assert len(report["samples_fingerprint"]) == 64
        assert len(report["domain_fingerprint"]) == 64
        header = csv.read_text().splitlines()[0]
        assert header == "index,tau,u,v,censored,passages,steps"

    def test_worker_env_var_matches_explicit_flag(self, tmp_path, monkeypatch):
        domain = write_json(tmp_path / "strip.json", STRIP)
        kwargs = [
            "simulate", "--domain", domain, "--start", "0,0",
            "--n", "9000", "--engine", "WosTime", "--seed", "4",
        ]
        monkeypatch.setenv("COMBEXIT_WORKERS", "3")
        run_command(kwargs + ["--out", str(tmp_path / "e.json"),
                              "--csv", str(tmp_path / "e.csv")])
        monkeypatch.delenv("COMBEXIT_WORKERS")
        run_command(kwargs + ["--workers", "1",
                              "--out", str(tmp_path / "w.json"),
                              "--csv", str(tmp_path / "w.csv")])
        assert (tmp_path / "e.csv").read_bytes() == (tmp_path / "w.csv").read_bytes()

    def test_window_escape_reports_and_exits_three(self, tmp_path):
        comb = dict(UNIFORM_COMB)
        comb["spec"] = dict(comb["spec"], window_radius=3)
        domain = write_json(tmp_path / "comb.json", comb)
        out = tmp_path / "r.json"
        csv = tmp_path / "s.csv"
        code = run_command(
            [
                "simulate", "--domain", domain, "--start", "0,0",
                "--n", "400", "--engine", "WosTime", "--time-cap", "1000",
                "--out", str(out), "--csv", str(csv),
            ]
        )
        assert code == EXIT_INCONCLUSIVE
        assert load(out)["error"]["kind"] == "window_escape"
        # failed runs leave no partial sample file behind
        assert not csv.exists()
        assert not list(tmp_path.glob("*.tmp"))


@pytest.fixture(scope="module")
def sample_csv(tmp_path_factory):
    root = tmp_path_factory.mktemp("samples")
    domain = write_json(root / "strip.json", STRIP)
    csv = root / "s.csv"
    run_command(
        [
            "simulate", "--domain", domain, "--start", "0,0",
            "--n", "4000", "--engine", "WosTime", "--seed", "2",
            "--out", str(root / "r.json"), "--csv", str(csv),
        ]
    )
    return csv


class TestSampleConsumers:
    def test_tail_report(self, tmp_path, sample_csv):
        out = tmp_path / "t.json"
        code = run_command(
            ["tail", "--samples", str(sample_csv), "--method", "hill",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        report = load(out)
        assert report["method"] == "hill"
        assert report["ci_95"][0] < report["H_hat"] < report["ci_95"][1]

    def test_verdict_on_strip_half_moment(self, tmp_path, sample_csv):
        out = tmp_path / "v.json"
        code = run_command(
            ["verdict", "--samples", str(sample_csv), "--p", "0.5",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        # every strip moment is finite and the tail is far from 1/2
        assert load(out)["verdict"] == "FiniteLikely"

    def test_missing_column_is_a_usage_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b\n1,2\n", encoding="utf-8")
        code = run_command(["tail", "--samples", str(bad)])
        assert code == EXIT_USAGE
        assert "column" in capsys.readouterr().err


class TestConstruct:
    def test_emitted_comb_feeds_check(self, tmp_path):
        out = tmp_path / "c.json"
        comb_out = tmp_path / "comb.json"
        code = run_command(
            ["construct", "--stages", "2", "--seed", "0",
             "--out", str(out), "--comb-out", str(comb_out)]
        )
        assert code == EXIT_OK
        report = load(out)
        assert [t["stage"] for t in report["trace"]] == [1, 2]
        assert all(t["lower_bound"] > t["stage"] for t in report["trace"])

        check_out = tmp_path / "chk.json"
        code = run_command(
            ["check", "--comb", str(comb_out), "--p", "0.5",
             "--out", str(check_out)]
        )
        assert code == EXIT_OK
        assert load(check_out)["status"] == "Inconclusive"

    def test_budget_exhaustion_exits_three_with_partial_trace(self, tmp_path):
        out = tmp_path / "c.json"
        code = run_command(
            ["construct", "--stages", "3", "--budget", "4000",
             "--out", str(out), "--comb-out", str(tmp_path / "comb.json")]
        )
        assert code == EXIT_INCONCLUSIVE
        report = load(out)
        assert report["error"]["kind"] == "budget_exhausted"
        assert report["trace"] == []


class TestXval:
    def test_strip_engines_agree(self, tmp_path):
        domain = write_json(tmp_path / "strip.json", STRIP)
        out = tmp_path / "x.json"
        code = run_command(
            ["xval", "--domain", domain, "--n", "6000", "--seed", "3",
             "--out", str(out)]
        )
        assert code == EXIT_OK
        report = load(out)
        assert report["agree_99"] is True
        assert all(pt["within_band"] for pt in report["points"])
        assert report["worst_band_fraction"] <= 1.0


class TestExitCodes:
    def test_unknown_flag(self, capsys):
        assert run_command(["theta0", "--frequency", "1"]) == EXIT_USAGE
        capsys.readouterr()

    def test_malformed_json_names_the_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"type": "vertical_strip", "left": -1.0\n', encoding="utf-8")
        code = run_command(
            ["simulate", "--domain", str(bad), "--start", "0,0", "--n", "10"]
        )
        assert code == EXIT_USAGE
        assert "line" in capsys.readouterr().err

    def test_missing_domain_file(self, tmp_path, capsys):
        code = run_command(
            ["simulate", "--domain", str(tmp_path / "none.json"),
             "--start", "0,0", "--n", "10"]
        )
        assert code == EXIT_USAGE
        capsys.readouterr()

    def test_validation_error_from_module_preconditions(self, tmp_path, capsys):
        domain = write_json(tmp_path / "strip.json", STRIP)
        # start outside the domain is caught before any sampling
        code = run_command(
            ["simulate", "--domain", domain, "--start", "5,0", "--n", "10",
             "--out", str(tmp_path / "r.json")]
        )
        assert code == EXIT_USAGE
        capsys.readouterr()
        assert not (tmp_path / "r.json").exists()
