"""Harness: config round trips, persistence, re-analysis, sweeps, CLI."""

import numpy as np
import pytest

import automala as am
from automala import harness


def small_config(tmp_path, **overrides):
    base = dict(
        target="normal(2)",
        sampler="automala",
        rounds=6,
        t_unadj=1,
        iterations=None,
        precond="mixture",
        seed=1,
        out_dir=str(tmp_path),
    )
    base.update(overrides)
    return harness.RunConfig(**base)


class TestRunConfig:
    def test_round_trip_is_lossless(self, tmp_path):
        config = small_config(tmp_path, sampler="mala(0.25)", seed=77)
        assert harness.RunConfig.from_dict(config.to_dict()) == config

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            harness.RunConfig.from_dict({"target": "normal(2)", "bogus": 1})

    def test_invalid_fields_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            small_config(tmp_path, sampler="nuts")
        with pytest.raises(ValueError):
            small_config(tmp_path, target="cauchy(2)")
        with pytest.raises(ValueError):
            small_config(tmp_path, precond="dense")
        with pytest.raises(ValueError):
            small_config(tmp_path, rounds=0)

    def test_fingerprint_ignores_output_dir(self, tmp_path):
        a = small_config(tmp_path / "a")
        b = small_config(tmp_path / "b")
        assert a.fingerprint() == b.fingerprint()
        assert a.fingerprint() != small_config(tmp_path, seed=2).fingerprint()

    @pytest.mark.parametrize(
        "spec,expected",
        [
            ("automala", ("automala", None)),
            ("mala(0.1)", ("mala", 0.1)),
            ("ula(2e-3)", ("ula", 0.002)),
            (" MALA( 0.5 ) ", ("mala", 0.5)),
        ],
    )
    def test_sampler_parsing(self, spec, expected):
        assert harness.parse_sampler(spec) == expected

    @pytest.mark.parametrize("spec", ["mala", "mala()", "ula(-1)", "automala(2)", "hmc(1)"])
    def test_sampler_parsing_rejects(self, spec):
        with pytest.raises(ValueError):
            harness.parse_sampler(spec)


class TestTracePersistence:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        trace = am.ChainTrace(
            positions=rng.standard_normal((32, 3)) * 1e3,
            eps_t=np.exp(rng.standard_normal(32)),
            accepted=rng.random(32) < 0.7,
            reversibility_ok=rng.random(32) < 0.9,
            alpha=rng.random(32),
            n_leapfrog=rng.integers(1, 20, 32),
        )
        path = tmp_path / "trace.csv"
        harness.write_trace(path, trace)
        loaded = harness.read_trace(path)
        np.testing.assert_array_equal(loaded.positions, trace.positions)
        np.testing.assert_array_equal(loaded.eps_t, trace.eps_t)
        np.testing.assert_array_equal(loaded.accepted, trace.accepted)
        np.testing.assert_array_equal(loaded.reversibility_ok, trace.reversibility_ok)
        np.testing.assert_array_equal(loaded.alpha, trace.alpha)
        np.testing.assert_array_equal(loaded.n_leapfrog, trace.n_leapfrog)

    def test_header_schema(self, tmp_path):
        trace = am.ChainTrace(
            positions=np.zeros((2, 2)),
            eps_t=np.ones(2),
            accepted=np.ones(2, dtype=bool),
            reversibility_ok=np.ones(2, dtype=bool),
            alpha=np.ones(2),
            n_leapfrog=np.ones(2, dtype=np.int64),
        )
        path = tmp_path / "trace.csv"
        harness.write_trace(path, trace)
        header = path.read_text().splitlines()[0]
        assert header == "iter,x1,x2,eps_t,accepted,reversibility_ok,n_leapfrog_cum,alpha"


class TestCmdRun:
    def test_automala_run_produces_artifacts(self, tmp_path):
        trace_path, report_path = harness.cmd_run(small_config(tmp_path))
        assert trace_path.exists() and report_path.exists()
        report = harness.read_report(report_path)
        analysis = report["analysis"]
        assert analysis["n_samples"] == 2 ** 6
        assert 0.0 < analysis["acceptance_rate"] < 1.0
        assert len(report["tuning"]) == 6
        assert analysis["n_leapfrog_total"] >= analysis["n_leapfrog_trace"]
        assert analysis["margin"] is not None

    def test_mala_run_smoke(self, tmp_path):
        config = small_config(tmp_path, sampler="mala(0.1)", iterations=500)
        _, report_path = harness.cmd_run(config)
        report = harness.read_report(report_path)
        assert report["tuning"] is None
        assert 0.0 < report["analysis"]["acceptance_rate"] < 1.0
        assert report["analysis"]["n_samples"] == 500

    def test_ula_run_smoke(self, tmp_path):
        config = small_config(tmp_path, sampler="ula(0.05)", iterations=300)
        _, report_path = harness.cmd_run(config)
        report = harness.read_report(report_path)
        assert report["analysis"]["acceptance_rate"] == 1.0

    def test_reanalysis_reproduces_report_exactly(self, tmp_path):
        config = small_config(tmp_path, target="funnel(2,2)", rounds=8)
        trace_path, report_path = harness.cmd_run(config)
        report = harness.read_report(report_path)
        target = am.make_target(config.target)
        loaded = harness.read_trace(trace_path)
        recomputed = harness._jsonable(
            harness.analyze_trace(
                target, loaded, n_leapfrog_total=report["analysis"]["n_leapfrog_total"]
            )
        )
        assert recomputed == report["analysis"]

    def test_byte_identical_reruns(self, tmp_path):
        config = small_config(tmp_path, target="funnel(2,2)", rounds=7, seed=3)
        t1, r1 = harness.cmd_run(config)
        first = (t1.read_bytes(), r1.read_bytes())
        t2, r2 = harness.cmd_run(config)
        assert (t2.read_bytes(), r2.read_bytes()) == first


class TestSweeps:
    def test_single_cell_matches_cmd_run(self, tmp_path):
        rows = harness.cmd_sweep_scale("funnel", [2.0], [5], rounds=6)
        assert len(rows) == 1
        row = rows[0]
        assert row["status"] == "ok"
        _, report_path = harness.cmd_run(
            small_config(tmp_path, target="funnel(2,2)", rounds=6, seed=5)
        )
        report = harness.read_report(report_path)
        assert row["min_ess"] == report["analysis"]["ess"]["min_ess"]
        assert row["margin_mean"] == report["analysis"]["margin"]["mean"]
        assert row["acceptance_rate"] == report["analysis"]["acceptance_rate"]

    def test_cell_failure_marked_and_sweep_continues(self, tmp_path):
        out = tmp_path / "table.csv"
        rows = harness.cmd_sweep_scale("funnel", [-1.0, 2.0], [1], rounds=4, out_path=out)
        assert len(rows) == 2
        assert rows[0]["status"].startswith("error:")
        assert rows[0]["min_ess"] is None
        assert rows[1]["status"] == "ok"
        text = out.read_text().splitlines()
        assert len(text) == 3

    def test_dimension_sweep_schema(self):
        rows = harness.cmd_sweep_dimension("normal", [2, 4], [1], rounds=5)
        assert [(r["dim"], r["seed"]) for r in rows] == [(2, 1), (4, 1)]
        assert all(r["status"] == "ok" for r in rows)

    def test_default_scale_grids(self):
        funnel = harness.default_scale_grid("funnel")
        banana = harness.default_scale_grid("banana")
        assert len(funnel) == 20 and len(banana) == 20
        assert funnel[0] == pytest.approx(5.0)
        assert funnel[-1] == pytest.approx(0.25)
        assert banana[0] == 2.0 ** 13 and banana[-1] == 2.0 ** -6


class TestMalaGrid:
    def test_relative_grid_anchors_at_final_step(self):
        rows = harness.cmd_mala_grid(
            "normal(2)", mode="relative", exponents=[-1, 0, 1], seeds=[1],
            rounds=6, iterations=400,
        )
        by_k = {row["k"]: row for row in rows}
        assert by_k[0]["eps"] == by_k[0]["automala_eps_final"]
        assert by_k[1]["eps"] == 2.0 * by_k[0]["eps"]
        assert all(row["status"] == "ok" for row in rows)

    def test_acceptance_monotone_in_step_size(self):
        rows = harness.cmd_mala_grid(
            "normal(2)", mode="absolute", exponents=list(range(-4, 2)), seeds=[2],
            iterations=2 ** 11,
        )
        alphas = [row["mala_mean_alpha"] for row in rows]
        for lo, hi in zip(alphas, alphas[1:]):
            assert hi <= lo + 0.05

    def test_invalid_mode_rejected(self):
        with pytest.raises(ValueError):
            harness.cmd_mala_grid("normal(2)", mode="sideways")


class TestFixedPoint:
    def test_single_point_grid(self):
        rows = harness.cmd_fixed_point("normal(1)", exponents=[0], n_samples=256, seed=1)
        assert len(rows) == 1
        assert rows[0]["status"] == "ok"
        assert rows[0]["g_hat"] > 0.0

    def test_requires_exact_sampler(self):
        target = am.TargetDensity(
            dim=1,
            log_density_fn=lambda x: -0.5 * float(x @ x),
            gradient_fn=lambda x: -x,
            name="no-sampler",
        )
        with pytest.raises(ValueError, match="no exact sampler"):
            harness.estimate_step_size_objective(
                target, 1.0, 16, np.random.default_rng(0)
            )


class TestPrecondAblation:
    def test_rows_cover_presets_and_seeds(self):
        rows = harness.cmd_precond_ablation(
            "normal(2)", presets=["identity", "mixture"], seeds=[1, 2], rounds=5
        )
        assert [(r["preset"], r["seed"]) for r in rows] == [
            ("identity", 1), ("identity", 2), ("mixture", 1), ("mixture", 2),
        ]
        assert all(r["status"] == "ok" for r in rows)

    def test_unknown_preset_rejected(self):
        with pytest.raises(ValueError):
            harness.cmd_precond_ablation("normal(2)", presets=["dense"])


class TestCli:
    def test_run_subcommand(self, tmp_path, capsys):
        code = harness.main(
            [
                "run", "--target", "normal(2)", "--rounds", "5",
                "--seed", "9", "--out", str(tmp_path),
            ]
        )
        assert code == 0
        assert (tmp_path / "trace.csv").exists()
        assert (tmp_path / "report.json").exists()
        assert "samples" in capsys.readouterr().out

    def test_fixed_point_subcommand(self, tmp_path):
        out = tmp_path / "fp.csv"
        code = harness.main(
            [
                "fixed-point", "--target", "normal(1)", "--ks", "0,1",
                "--samples", "64", "--out", str(out),
            ]
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("target,k,eps_init")
        assert len(lines) == 3

    def test_env_var_default_out(self, tmp_path, monkeypatch):
        monkeypatch.setenv(harness.OUTPUT_DIR_ENV, str(tmp_path / "from-env"))
        assert harness.default_output_dir() == str(tmp_path / "from-env")

    def test_sweep_dim_subcommand(self, tmp_path):
        out = tmp_path / "dims.csv"
        code = harness.main(
            [
                "sweep-dim", "--family", "normal", "--dims", "2",
                "--seeds", "1", "--rounds", "4", "--out", str(out),
            ]
        )
        assert code == 0
        assert out.exists()
