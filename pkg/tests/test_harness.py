"""Tests for config handling, campaign persistence, lemma plumbing, and figures."""

import os

import numpy as np
import pytest

from gpei import bounds, harness
from gpei.config import ExperimentConfig, config_hash, from_flat, load_config, parse_config_file
from gpei.kernels import KernelSpec
from gpei.rng import splitmix64, trial_seed


def tiny_config(**kw):
    base = dict(d=1, grid_per_dim=30, kernel=KernelSpec("se", 0.2), noise_sd=0.05,
                delta=0.1, T=12, T0=1, trials=3, seed=2024, theorem="thm46")
    base.update(kw)
    return ExperimentConfig(**base)


class TestRngDerivation:
    def test_splitmix_reference_values(self):
        # reference outputs of the splitmix64 sequence from seed 0 and 1
        assert splitmix64(0) == 0xE220A8397B1DCDAF
        assert splitmix64(1) == 0x910A2DEC89025CC1

    def test_trial_seed_is_xor_of_splitmix(self):
        assert trial_seed(1234, 7) == 1234 ^ splitmix64(7)

    def test_trial_seeds_distinct(self):
        seeds = {trial_seed(42, i) for i in range(1000)}
        assert len(seeds) == 1000


class TestConfig:
    def test_defaults_validate(self):
        cfg = ExperimentConfig()
        cfg.validate()
        assert cfg.grid_size == 200
        assert cfg.kernel.lengthscale == pytest.approx(0.2 * cfg.r)

    def test_grid_shape(self):
        cfg = tiny_config(d=2, grid_per_dim=7, T=12)
        pts = cfg.grid_points()
        assert pts.shape == (49, 2)
        assert pts.min() == 0.0 and pts.max() == cfg.r

    def test_grid_cap(self):
        with pytest.raises(ValueError):
            tiny_config(d=4, grid_per_dim=10, T=12).validate()  # 10^4 > 4096

    def test_budget_must_fit_grid(self):
        with pytest.raises(ValueError):
            tiny_config(grid_per_dim=8, T=12).validate()

    def test_one_point_grid_exempt_from_budget_cap(self):
        tiny_config(grid_per_dim=1, T=8).validate()

    def test_theorem_and_delta_validation(self):
        with pytest.raises(ValueError):
            tiny_config(theorem="thm99").validate()
        with pytest.raises(ValueError):
            tiny_config(delta=0.0).validate()

    def test_flat_roundtrip(self):
        cfg = tiny_config(kernel=KernelSpec("matern", 0.3, nu=1.5), kappa=1e-6)
        rebuilt = from_flat(cfg.to_flat())
        assert rebuilt == cfg

    def test_hash_stability_and_sensitivity(self):
        cfg = tiny_config()
        assert config_hash(cfg) == config_hash(tiny_config())
        assert config_hash(cfg) != config_hash(tiny_config(seed=2025))

    def test_config_file_parsing(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# campaign setup\n"
            "d = 1\n"
            "grid_per_dim = 30\n"
            "T = 12\n"
            "noise_sd = 0.0\n"
            "kernel_family = se\n"
            "theorem = thm42\n"
        )
        cfg = load_config(str(path))
        assert cfg.noise_sd == 0.0
        assert cfg.theorem == "thm42"
        assert cfg.T == 12

    def test_cli_overrides_beat_file(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("seed = 1\ntrials = 5\nT = 12\ngrid_per_dim = 30\n")
        cfg = load_config(str(path), overrides={"seed": "99"})
        assert cfg.seed == 99 and cfg.trials == 5

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            from_flat({"gamma": "3"})

    def test_lengthscale_defaults_to_fifth_of_box(self):
        cfg = from_flat({"r": "5.0", "grid_per_dim": "30", "T": "12"})
        assert cfg.kernel.lengthscale == pytest.approx(1.0)

    def test_bad_config_file_line(self, tmp_path):
        path = tmp_path / "broken.cfg"
        path.write_text("this is not a key value pair\n")
        with pytest.raises(ValueError):
            parse_config_file(str(path))


class TestCampaign:
    def test_files_written(self, tmp_path):
        cfg = tiny_config()
        result = harness.run_experiment(cfg, str(tmp_path))
        names = sorted(os.listdir(tmp_path))
        assert "coverage.csv" in names
        assert "summary.txt" in names
        assert "config.txt" in names
        assert sum(n.startswith("trace_") for n in names) == cfg.trials
        assert result.variance_checked and result.variance_violations == 0

    def test_trace_csv_schema(self, tmp_path):
        cfg = tiny_config(T=12)
        harness.run_experiment(cfg, str(tmp_path))
        lines = (tmp_path / "trace_0000.csv").read_text().splitlines()
        assert lines[0].startswith("# config_hash=")
        assert lines[1] == (
            "trial,t,x_next_0,y_next,y_plus,mu_next,sigma_next,ei_next,"
            "sigma_at_star,r_t,r0_t,bound,holds"
        )
        assert len(lines) == 2 + (cfg.T - cfg.T0)

    def test_byte_identical_reruns(self, tmp_path):
        cfg = tiny_config()
        a, b = tmp_path / "a", tmp_path / "b"
        harness.run_experiment(cfg, str(a))
        harness.run_experiment(cfg, str(b))
        for name in sorted(os.listdir(a)):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_parallel_matches_serial(self, tmp_path):
        cfg = tiny_config(trials=4)
        a, b = tmp_path / "serial", tmp_path / "parallel"
        harness.run_experiment(cfg, str(a), workers=1)
        harness.run_experiment(cfg, str(b), workers=2)
        for name in sorted(os.listdir(a)):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_noiseless_campaign_skips_variance_check(self, tmp_path):
        cfg = tiny_config(noise_sd=0.0, T=12)
        result = harness.run_experiment(cfg, str(tmp_path))
        assert not result.variance_checked
        assert "variance_sum SKIPPED" in (tmp_path / "summary.txt").read_text()
        # noiseless window divisor 2 admits small t, so coverage rows exist
        assert len(result.coverage) > 0

    def test_single_point_grid_trivial_coverage(self, tmp_path):
        cfg = tiny_config(grid_per_dim=1, T=8, trials=1)
        result = harness.run_experiment(cfg, str(tmp_path))
        assert result.passed
        for row in result.coverage:
            assert row.holds_frequency == 1.0

    def test_coverage_row_invariants(self):
        cfg = tiny_config(T=12, noise_sd=0.0)
        result = harness.run_campaign(cfg)
        for row in result.coverage:
            assert 0.0 <= row.holds_frequency <= 1.0
            assert row.wilson_lower <= row.holds_frequency
            assert row.trials == cfg.trials

    def test_two_dimensional_campaign(self, tmp_path):
        cfg = tiny_config(d=2, grid_per_dim=12, T=20, trials=2)
        result = harness.run_experiment(cfg, str(tmp_path))
        assert result.passed and len(result.coverage) > 0
        header = (tmp_path / "trace_0000.csv").read_text().splitlines()[1]
        assert header.startswith("trial,t,x_next_0,x_next_1,y_next")

    def test_matern_noiseless_campaign(self):
        cfg = tiny_config(
            kernel=KernelSpec("matern", 0.2, nu=1.5), noise_sd=0.0, T=20,
            grid_per_dim=40, theorem="thm42",
        )
        result = harness.run_campaign(cfg)
        assert result.passed and not result.variance_checked


class TestWilson:
    def test_lower_bound_properties(self):
        assert harness.wilson_lower(100, 100) < 1.0
        assert harness.wilson_lower(0, 50) == 0.0
        assert harness.wilson_lower(95, 100) < 0.95
        mid = harness.wilson_lower(50, 100)
        assert 0.3 < mid < 0.5


class TestVerifyLemmaPlumbing:
    def test_unknown_lemma(self):
        with pytest.raises(ValueError):
            harness.verify_lemma("no_such_lemma", tiny_config())

    def test_mc_lemma_requires_500(self):
        with pytest.raises(ValueError):
            harness.verify_lemma("fmu", tiny_config(), n=100)

    def test_closed_form_lemmas_pass(self):
        cfg = tiny_config()
        for lemma in ("tail_bound", "tau_vs_phi", "ei_monotone"):
            report = harness.verify_lemma(lemma, cfg)
            assert report.passed, lemma

    def test_fmu_smoke(self):
        report = harness.verify_lemma("fmu", tiny_config(grid_per_dim=30, T=12), n=500)
        assert report.passed
        assert report.metric("n") == 500

    def test_report_file(self, tmp_path):
        cfg = tiny_config()
        report = harness.verify_lemma("tail_bound", cfg)
        path = harness.write_lemma_report(str(tmp_path), report, cfg)
        text = open(path).read()
        assert text.splitlines()[0].startswith("# config_hash=")
        assert "passed,1" in text


class TestFigures:
    def test_f1_schema_and_tail_bound(self, tmp_path):
        path = harness.emit_figure_data("F1_PhiTau", str(tmp_path / "f1.csv"))
        lines = open(path).read().splitlines()
        assert lines[1] == "z,cdf_neg_z,half_gauss,tau_neg_z"
        assert len(lines) == 2 + 601
        for line in lines[2:]:
            z, c, g, t = map(float, line.split(","))
            assert c <= g
            assert t <= c or z == 0.0  # tau(-z) < cdf(-z) for z > 0

    def test_f3_slice_minimum_location(self, tmp_path):
        path = harness.emit_figure_data("F3_BarTau", str(tmp_path / "f3.csv"))
        rows = [line.split(",") for line in open(path).read().splitlines()[2:]]
        slice_rows = [(float(r[2]), float(r[3]), float(r[4])) for r in rows if r[0] == "slice"]
        rho_step = slice_rows[1][0] - slice_rows[0][0]
        best_rho = min(slice_rows, key=lambda x: x[1])[0]
        from gpei.stdnormal import BarTauParams, find_rho_bar

        rho_bar = find_rho_bar(BarTauParams(z=1e-3, w=2.0, c3=18.0))
        assert abs(best_rho - rho_bar) <= rho_step
        assert all(margin > 0 for _, _, margin in slice_rows)

    def test_f4_slice_positive_margin(self, tmp_path):
        path = harness.emit_figure_data("F4_TildeTau", str(tmp_path / "f4.csv"))
        rows = [line.split(",") for line in open(path).read().splitlines()[2:]]
        assert all(float(r[4]) > 0 for r in rows if r[0] == "slice")

    def test_f5_matches_compare_coefficients(self, tmp_path):
        path = harness.emit_figure_data("F5_Coeffs", str(tmp_path / "f5.csv"))
        rows = [line.split(",") for line in open(path).read().splitlines()[2:]]
        row = next(r for r in rows if float(r[0]) == 0.1)
        cmp_ = bounds.compare_coefficients(0.1)
        assert float(row[1]) == np.log10(cmp_.c4_42)
        assert float(row[2]) == np.log10(cmp_.c5_42)
        assert float(row[3]) == np.log10(cmp_.c4_46)
        assert float(row[4]) == np.log10(cmp_.c5_46)

    def test_figures_reproducible(self, tmp_path):
        p1 = harness.emit_figure_data("F2_EiContour", str(tmp_path / "a.csv"))
        p2 = harness.emit_figure_data("F2_EiContour", str(tmp_path / "b.csv"))
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_unknown_figure(self, tmp_path):
        with pytest.raises(ValueError):
            harness.emit_figure_data("F9_Nope", str(tmp_path / "x.csv"))
