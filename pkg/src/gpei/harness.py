"""Experiment campaigns, Monte-Carlo lemma verification, and figure-data emission.

A campaign samples one objective per trial from the GP prior on the config
grid, runs the optimization loop, evaluates the configured error bound at
every valid iteration, and aggregates coverage (how often the bound held)
against the nominal 1 - delta.  Coverage checks pass when the empirical
frequency is at least (1 - delta) - 3*sqrt(delta*(1-delta)/trials): the
theorems state exact probabilities and sampling noise must not be flagged
as a violation.

Everything is deterministic given the config: trial substreams are derived
as seed XOR splitmix64(trial_index), floats are serialized with shortest
round-trip repr, and rows are sorted by trial index before writing, so reruns
reproduce output files byte for byte.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import bounds, eiopt, gp, kernels
from .config import ExperimentConfig, config_hash
from .eiopt import Trace
from .rng import derive_stream_seed, trial_seed
from .stdnormal import BarTauParams, bar_tau, cdf, ei_ab, pdf, tau, tilde_tau

# 99% two-sided normal quantile, used by the Wilson score interval.
_WILSON_Z = 2.5758293035489004

# Purpose tags for lemma-campaign substreams.
_FMU_STREAM = 0x464D55
_IEI_STREAM = 0x494549
_ICDF_STREAM = 0x494344

LEMMA_IDS = (
    "fmu",
    "fmu_t",
    "iei_add",
    "iei_ratio",
    "icdf",
    "tail_bound",
    "tau_vs_phi",
    "ei_monotone",
)

# Fixed Monte-Carlo protocol sizes (draws for the pointwise lemmas, full runs
# for the all-t lemma, function draws for the improvement CDF).
LEMMA_DEFAULT_N = {
    "fmu": 2000,
    "iei_add": 2000,
    "iei_ratio": 2000,
    "fmu_t": 500,
    "icdf": 100_000,
}
_MC_LEMMAS = frozenset(LEMMA_DEFAULT_N)
_FMU_T_STEPS = 30
_DESIGN_SIZE = 5

# Absolute slack on concentration comparisons; covers posterior-arithmetic
# roundoff when a predictive sd degenerates to ~0, nothing more.
_ROUNDOFF_GUARD = 1e-9

FIGURE_IDS = ("F1_PhiTau", "F2_EiContour", "F3_BarTau", "F4_TildeTau", "F5_Coeffs")


def wilson_lower(successes: int, n: int, z: float = _WILSON_Z) -> float:
    """Lower Wilson score limit for a binomial proportion (99% confidence)."""
    if n <= 0:
        raise ValueError("n must be positive")
    p = successes / n
    denom = 1.0 + z * z / n
    center = p + z * z / (2 * n)
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return max(0.0, (center - half) / denom)


def coverage_target(delta: float, trials: int) -> float:
    """(1 - delta) minus three binomial standard errors."""
    return (1.0 - delta) - 3.0 * math.sqrt(delta * (1.0 - delta) / trials)


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoverageRow:
    theorem: str
    t: int
    trials: int
    holds: int
    holds_frequency: float
    wilson_lower: float
    bound_mean: float
    bound_min: float
    r_t_mean: float
    r_t_max: float
    margin_min: float
    sigma_win_mean: float
    sigma_win_min_mean: float
    passed: bool


@dataclass(frozen=True)
class CampaignResult:
    config: ExperimentConfig
    config_hash: str
    coverage: tuple[CoverageRow, ...]
    traces: tuple[Trace, ...]
    variance_violations: int
    variance_checked: bool
    passed: bool


def run_trial(config: ExperimentConfig, trial_index: int) -> Trace:
    """Sample one objective and run the loop; fully determined by config and index."""
    seed = trial_seed(config.seed, trial_index)
    sample = gp.sample_prior(config.kernel, config.grid_points(), seed)
    return eiopt.run(config, sample, seed, config_hash=config_hash(config))


def _run_trial_star(args) -> Trace:
    return run_trial(*args)


def valid_bound_ts(config: ExperimentConfig, constants: bounds.BoundConstants) -> list[int]:
    """Iterations at which the configured bound is defined and recorded."""
    return [
        t
        for t in range(config.T0, config.T)
        if t > constants.window_divisor and t >= constants.t_min
    ]


def run_campaign(config: ExperimentConfig, workers: int = 1) -> CampaignResult:
    """Run all trials and aggregate bound coverage; no file output."""
    config.validate()
    constants = bounds.constants_for(config.theorem, config.delta, noisy=config.noise_sd > 0)
    tasks = [(config, i) for i in range(config.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_run_trial_star, tasks, chunksize=8))
    else:
        traces = [run_trial(*task) for task in tasks]

    rows: list[CoverageRow] = []
    target = coverage_target(config.delta, config.trials)
    for t in valid_bound_ts(config, constants):
        bvals, rvals, swins, swins_min = [], [], [], []
        holds = 0
        n_at_t = 0
        for trace in traces:
            try:
                trace.row_at(t)
            except ValueError:
                continue  # stopped early before t
            b, r, ok = bounds.empirical_bound_check(trace, constants, trace.f_abs_max, config.noise_sd, t)
            smax, smin = bounds.window_sigma(trace, constants, t)
            bvals.append(b)
            rvals.append(r)
            swins.append(smax)
            swins_min.append(smin)
            holds += int(ok)
            n_at_t += 1
        if n_at_t == 0:
            continue
        freq = holds / n_at_t
        rows.append(
            CoverageRow(
                theorem=config.theorem,
                t=t,
                trials=n_at_t,
                holds=holds,
                holds_frequency=freq,
                wilson_lower=wilson_lower(holds, n_at_t),
                bound_mean=float(np.mean(bvals)),
                bound_min=float(np.min(bvals)),
                r_t_mean=float(np.mean(rvals)),
                r_t_max=float(np.max(rvals)),
                margin_min=float(np.min(np.array(bvals) - np.array(rvals))),
                sigma_win_mean=float(np.mean(swins)),
                sigma_win_min_mean=float(np.mean(swins_min)),
                passed=freq >= target,
            )
        )

    variance_checked = config.noise_sd > 0
    violations = 0
    if variance_checked:
        for trace in traces:
            _, _, ok = gp.variance_sum_check(trace.sigma_at_next(), config.noise_var)
            violations += int(not ok)

    passed = all(row.passed for row in rows) and violations == 0
    return CampaignResult(
        config=config,
        config_hash=config_hash(config),
        coverage=tuple(rows),
        traces=tuple(traces),
        variance_violations=violations,
        variance_checked=variance_checked,
        passed=passed,
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_lines(path: str, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _meta_line(cfg_hash: str, seed: int) -> str:
    return f"# config_hash={cfg_hash} seed={seed}"


def write_trace_csv(path: str, trial_index: int, trace: Trace, config: ExperimentConfig,
                    constants: bounds.BoundConstants) -> None:
    d = config.d
    header = (
        ["trial", "t"]
        + [f"x_next_{i}" for i in range(d)]
        + ["y_next", "y_plus", "mu_next", "sigma_next", "ei_next", "sigma_at_star", "r_t", "r0_t", "bound", "holds"]
    )
    meta = f"{_meta_line(trace.config_hash, config.seed)} trial={trial_index} trial_seed={trace.seed}"
    lines = [meta, ",".join(header)]
    checkable = set(valid_bound_ts(config, constants))
    for row in trace.rows:
        if row.t in checkable:
            b, _, ok = bounds.empirical_bound_check(trace, constants, trace.f_abs_max, config.noise_sd, row.t)
            bound_s, holds_s = _fmt(b), str(int(ok))
        else:
            bound_s, holds_s = "", ""
        cells = (
            [str(trial_index), str(row.t)]
            + [_fmt(c) for c in row.x_next]
            + [
                _fmt(row.y_next),
                _fmt(row.y_plus),
                _fmt(row.mu_next),
                _fmt(row.sigma_next),
                _fmt(row.ei_next),
                _fmt(row.sigma_at_star),
                _fmt(row.r_t),
                _fmt(row.r0_t),
                bound_s,
                holds_s,
            ]
        )
        lines.append(",".join(cells))
    _write_lines(path, lines)


def write_coverage_csv(path: str, result: CampaignResult) -> None:
    header = [
        "theorem", "t", "trials", "holds", "holds_frequency", "wilson_lower",
        "bound_mean", "bound_min", "r_t_mean", "r_t_max", "margin_min",
        "sigma_win_mean", "sigma_win_min_mean", "passed",
    ]
    lines = [_meta_line(result.config_hash, result.config.seed), ",".join(header)]
    for row in result.coverage:
        lines.append(
            ",".join(
                [
                    row.theorem,
                    str(row.t),
                    str(row.trials),
                    str(row.holds),
                    _fmt(row.holds_frequency),
                    _fmt(row.wilson_lower),
                    _fmt(row.bound_mean),
                    _fmt(row.bound_min),
                    _fmt(row.r_t_mean),
                    _fmt(row.r_t_max),
                    _fmt(row.margin_min),
                    _fmt(row.sigma_win_mean),
                    _fmt(row.sigma_win_min_mean),
                    str(int(row.passed)),
                ]
            )
        )
    _write_lines(path, lines)


def campaign_summary_lines(result: CampaignResult) -> list[str]:
    cfg = result.config
    lines = [
        _meta_line(result.config_hash, cfg.seed),
        f"target holds_frequency >= {_fmt(coverage_target(cfg.delta, cfg.trials))} (1-delta minus 3 SE)",
    ]
    for row in result.coverage:
        lines.append(
            f"check coverage[{row.theorem},t={row.t}] {'PASS' if row.passed else 'FAIL'} "
            f"holds_frequency={_fmt(row.holds_frequency)} wilson_lower={_fmt(row.wilson_lower)}"
        )
    if result.variance_checked:
        ok = result.variance_violations == 0
        lines.append(
            f"check variance_sum {'PASS' if ok else 'FAIL'} violations={result.variance_violations}/{cfg.trials}"
        )
    else:
        lines.append("check variance_sum SKIPPED (noiseless run)")
    lines.append(f"overall {'PASS' if result.passed else 'FAIL'}")
    return lines


def run_experiment(config: ExperimentConfig, out_dir: str, workers: int = 1) -> CampaignResult:
    """Run a campaign and persist per-trial traces, coverage, and a summary."""
    result = run_campaign(config, workers=workers)
    os.makedirs(out_dir, exist_ok=True)
    constants = bounds.constants_for(config.theorem, config.delta, noisy=config.noise_sd > 0)
    width = max(4, len(str(config.trials - 1)))
    for i, trace in enumerate(result.traces):
        write_trace_csv(os.path.join(out_dir, f"trace_{i:0{width}d}.csv"), i, trace, config, constants)
    write_coverage_csv(os.path.join(out_dir, "coverage.csv"), result)
    _write_lines(os.path.join(out_dir, "config.txt"), result.config.flat_text().splitlines())
    _write_lines(os.path.join(out_dir, "summary.txt"), campaign_summary_lines(result))
    return result


# ---------------------------------------------------------------------------
# Lemma verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaReport:
    lemma: str
    passed: bool
    metrics: tuple[tuple[str, float], ...]

    def metric(self, name: str) -> float:
        for key, value in self.metrics:
            if key == name:
                return value
        raise KeyError(name)

    def lines(self) -> list[str]:
        body = " ".join(f"{k}={_fmt(v)}" for k, v in self.metrics)
        return [f"check lemma[{self.lemma}] {'PASS' if self.passed else 'FAIL'} {body}"]


def _lemma_fixture(config: ExperimentConfig):
    """Fixed 5-point design plus a fixed off-design query on the config grid."""
    grid = config.grid_points()
    n = grid.shape[0]
    if n < _DESIGN_SIZE + 1:
        raise ValueError(f"lemma fixture needs a grid of at least {_DESIGN_SIZE + 1} points, got {n}")
    design = sorted({int(round(i)) for i in np.linspace(0, n - 1, _DESIGN_SIZE)})
    query = int(0.35 * (n - 1))
    while query in design:
        query = (query + 1) % n
    pts = np.vstack([grid[design], grid[query][None, :]])
    return pts


def _joint_draws(config: ExperimentConfig, n_draws: int, stream: int):
    """Draw n_draws joint objective vectors on (design, query) and noisy observations.

    Returns (f_design, f_query, y_design, posterior weights, sigma at query).
    """
    pts = _lemma_fixture(config)
    k = pts.shape[0] - 1
    L, _ = gp.chol_with_jitter(kernels.gram(config.kernel, pts))
    rng = np.random.default_rng(derive_stream_seed(config.seed, stream))
    z = rng.standard_normal((n_draws, k + 1))
    f = z @ L.T
    eps = config.noise_sd * rng.standard_normal((n_draws, k))
    y = f[:, :k] + eps

    k_design = kernels.gram(config.kernel, pts[:k])
    k_query = kernels.cross(config.kernel, pts[:k], pts[k])
    a_mat = k_design + config.noise_var * np.eye(k)
    l_small, _ = gp.chol_with_jitter(a_mat)
    w_vec = solve_triangular(l_small.T, solve_triangular(l_small, k_query, lower=True), lower=False)
    var_q = 1.0 - float(k_query @ w_vec)
    sigma_q = math.sqrt(max(var_q, 0.0))
    mu_q = y @ w_vec
    return f[:, :k], f[:, k], y, mu_q, sigma_q


def _coverage_metrics(indicator: np.ndarray, delta: float) -> tuple[bool, tuple[tuple[str, float], ...]]:
    n = indicator.size
    freq = float(np.mean(indicator))
    target = coverage_target(delta, n)
    return freq >= target, (
        ("n", float(n)),
        ("delta", delta),
        ("frequency", freq),
        ("target", target),
        ("wilson_lower", wilson_lower(int(np.sum(indicator)), n)),
    )


def _verify_fmu(config: ExperimentConfig, n: int) -> LemmaReport:
    _, f_q, _, mu_q, sigma_q = _joint_draws(config, n, _FMU_STREAM)
    beta = 2.0 * math.log(1.0 / config.delta)
    ok = np.abs(f_q - mu_q) <= math.sqrt(beta) * sigma_q + _ROUNDOFF_GUARD
    passed, metrics = _coverage_metrics(ok, config.delta)
    return LemmaReport("fmu", passed, metrics + (("beta", beta),))


def _verify_iei_add(config: ExperimentConfig, n: int) -> LemmaReport:
    _, f_q, y, mu_q, sigma_q = _joint_draws(config, n, _IEI_STREAM)
    beta = max(1.44, 2.0 * math.log(bounds.C_ALPHA / config.delta))
    y_plus = y.min(axis=1)
    improve = np.maximum(y_plus - f_q, 0.0)
    ei_vals = sigma_q * np.asarray(tau((y_plus - mu_q) / sigma_q))
    ok = np.abs(improve - ei_vals) <= math.sqrt(beta) * sigma_q + _ROUNDOFF_GUARD
    passed, metrics = _coverage_metrics(ok, config.delta)
    return LemmaReport("iei_add", passed, metrics + (("beta", beta),))


def _verify_iei_ratio(config: ExperimentConfig, n: int) -> LemmaReport:
    _, f_q, y, mu_q, sigma_q = _joint_draws(config, n, _IEI_STREAM)
    beta = 2.0 * math.log(1.0 / config.delta)
    ratio = tau(-math.sqrt(beta)) / tau(math.sqrt(beta))
    y_plus = y.min(axis=1)
    improve = np.maximum(y_plus - f_q, 0.0)
    ei_vals = sigma_q * np.asarray(tau((y_plus - mu_q) / sigma_q))
    ok = ratio * improve <= ei_vals + _ROUNDOFF_GUARD
    passed, metrics = _coverage_metrics(ok, config.delta)
    return LemmaReport("iei_ratio", passed, metrics + (("beta", beta), ("ratio", float(ratio))))


def _verify_fmu_t(config: ExperimentConfig, n: int) -> LemmaReport:
    """Fraction of full runs where the all-t prediction-error bound never fails."""
    run_cfg = dataclasses.replace(config, T=_FMU_T_STEPS, trials=n)
    run_cfg.validate()
    successes = np.zeros(n, dtype=bool)
    for i in range(n):
        trace = run_trial(run_cfg, i)
        ok = True
        for row in trace.rows:
            beta_t = bounds.beta_t_seq(row.t + 1, config.delta)
            if abs(row.f_next - row.mu_next) > math.sqrt(beta_t) * row.sigma_next + _ROUNDOFF_GUARD:
                ok = False
                break
        successes[i] = ok
    passed, metrics = _coverage_metrics(successes, config.delta)
    return LemmaReport("fmu_t", passed, metrics + (("steps", float(_FMU_T_STEPS)),))


def _verify_icdf(config: ExperimentConfig, n: int) -> LemmaReport:
    """Improvement CDF: MC frequency of I <= a against Phi(a/sigma - z)."""
    mu, sigma, y_plus = 0.3, 0.6, 0.5
    z_t = (y_plus - mu) / sigma
    rng = np.random.default_rng(derive_stream_seed(config.seed, _ICDF_STREAM))
    f = mu + sigma * rng.standard_normal(n)
    improve = np.maximum(y_plus - f, 0.0)
    worst = 0.0
    for a in (0.0, 0.5 * sigma, sigma, 2.0 * sigma):
        freq = float(np.mean(improve <= a))
        predicted = cdf(a / sigma - z_t)
        worst = max(worst, abs(freq - predicted))
    return LemmaReport(
        "icdf",
        worst <= 0.01,
        (("n", float(n)), ("max_abs_error", worst), ("tolerance", 0.01)),
    )


def _verify_tail_bound(config: ExperimentConfig, n: int) -> LemmaReport:
    c = np.logspace(-3, math.log10(8.0), 400)
    margin = 0.5 * np.exp(-0.5 * c * c) - np.asarray(cdf(-c))
    worst = float(np.min(margin))
    return LemmaReport("tail_bound", worst >= 0.0, (("points", 400.0), ("min_margin", worst)))


def _verify_tau_vs_phi(config: ExperimentConfig, n: int) -> LemmaReport:
    z = np.linspace(1e-3, 10.0, 1000)
    margin = np.asarray(cdf(-z)) - np.asarray(tau(-z))
    worst = float(np.min(margin))
    return LemmaReport("tau_vs_phi", worst > 0.0, (("points", 1000.0), ("min_margin", worst)))


def _verify_ei_monotone(config: ExperimentConfig, n: int) -> LemmaReport:
    """Finite-difference partials of ei_ab match Phi(a/b) and phi(a/b).

    The grid keeps |a/b| <= 6: beyond that the b-partial phi(a/b) drops below
    the rounding floor of a central difference (~eps*|ei|/h) and its sign can
    no longer be resolved numerically.
    """
    h = 1e-5
    a = np.linspace(-1.8, 1.8, 19)[:, None]
    b = np.linspace(0.3, 1.0, 8)[None, :]
    a_grid = np.broadcast_to(a, (19, 8))
    b_grid = np.broadcast_to(b, (19, 8))
    fd_a = (np.asarray(ei_ab(a_grid + h, b_grid)) - np.asarray(ei_ab(a_grid - h, b_grid))) / (2 * h)
    fd_b = (np.asarray(ei_ab(a_grid, b_grid + h)) - np.asarray(ei_ab(a_grid, b_grid - h))) / (2 * h)
    err_a = float(np.max(np.abs(fd_a - np.asarray(cdf(a_grid / b_grid)))))
    err_b = float(np.max(np.abs(fd_b - np.asarray(pdf(a_grid / b_grid)))))
    positive = bool(np.all(fd_a > 0) and np.all(fd_b > 0))
    passed = positive and err_a <= 1e-6 and err_b <= 1e-6
    return LemmaReport(
        "ei_monotone",
        passed,
        (("max_err_da", err_a), ("max_err_db", err_b), ("all_positive", float(positive))),
    )


_LEMMA_FUNCS = {
    "fmu": _verify_fmu,
    "fmu_t": _verify_fmu_t,
    "iei_add": _verify_iei_add,
    "iei_ratio": _verify_iei_ratio,
    "icdf": _verify_icdf,
    "tail_bound": _verify_tail_bound,
    "tau_vs_phi": _verify_tau_vs_phi,
    "ei_monotone": _verify_ei_monotone,
}


def verify_lemma(lemma_id: str, config: ExperimentConfig, n: int | None = None) -> LemmaReport:
    """Run one lemma's verification protocol and report pass/fail.

    ``n`` overrides the protocol's default Monte-Carlo size; Monte-Carlo
    protocols require n >= 500.  Closed-form lemmas scan fixed grids and
    ignore n.
    """
    key = lemma_id.strip().lower()
    if key not in _LEMMA_FUNCS:
        raise ValueError(f"unknown lemma id {lemma_id!r}; known: {LEMMA_IDS}")
    config.validate()
    size = n if n is not None else LEMMA_DEFAULT_N.get(key, 0)
    if key in _MC_LEMMAS and size < 500:
        raise ValueError(f"Monte-Carlo lemma {key!r} requires at least 500 draws, got {size}")
    return _LEMMA_FUNCS[key](config, size)


def write_lemma_report(out_dir: str, report: LemmaReport, config: ExperimentConfig) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"verify_{report.lemma}.csv")
    lines = [_meta_line(config_hash(config), config.seed), "metric,value"]
    for key, value in report.metrics:
        lines.append(f"{key},{_fmt(value)}")
    lines.append(f"passed,{int(report.passed)}")
    _write_lines(path, lines)

    # summary.txt accumulates one line per check; merge-by-name keeps the
    # final file deterministic regardless of how many lemmas share the dir
    summary_path = os.path.join(out_dir, "summary.txt")
    existing: dict[str, str] = {}
    if os.path.exists(summary_path):
        for line in open(summary_path, "r", encoding="utf-8"):
            name = line.split(" ", 2)[1] if line.startswith("check ") else line.strip()
            existing[name] = line.rstrip("\n")
    for line in report.lines():
        existing[line.split(" ", 2)[1]] = line
    _write_lines(summary_path, [existing[k] for k in sorted(existing)])
    return path


# ---------------------------------------------------------------------------
# Figure data
# ---------------------------------------------------------------------------

_F3_PARAMS = BarTauParams(z=1e-3, w=2.0, c3=18.0)
_F4_W, _F4_C1, _F4_C3 = 3.0, 741.0, 296.0


def _figure_rows(fig_id: str) -> tuple[list[str], list[list[str]]]:
    if fig_id == "F1_PhiTau":
        header = ["z", "cdf_neg_z", "half_gauss", "tau_neg_z"]
        rows = []
        for i in range(601):
            z = i / 100.0
            rows.append([_fmt(z), _fmt(cdf(-z)), _fmt(0.5 * math.exp(-0.5 * z * z)), _fmt(tau(-z))])
        return header, rows

    if fig_id == "F2_EiContour":
        header = ["a", "b", "ei"]
        rows = []
        for j in range(121):
            a = -3.0 + j * 0.05
            for k in range(1, 101):
                b = k / 100.0
                rows.append([_fmt(a), _fmt(b), _fmt(ei_ab(a, b))])
        return header, rows

    if fig_id == "F3_BarTau":
        p = _F3_PARAMS
        header = ["part", "z", "rho", "log10_bar_tau", "bar_tau_minus_tau"]
        rows = []
        for i in range(50):
            z = -5.0 + i * 0.1
            pz = BarTauParams(z=z, w=p.w, c3=p.c3)
            for j in range(1, 101):
                rho = pz.rho_max * j / 101.0
                val = bar_tau(rho, pz)
                rows.append(["contour", _fmt(z), _fmt(rho), _fmt(math.log10(val)), _fmt(val - tau(z))])
        ref = tau(p.z)
        for j in range(1, 201):
            rho = p.rho_max * j / 201.0
            val = bar_tau(rho, p)
            rows.append(["slice", _fmt(p.z), _fmt(rho), _fmt(math.log10(val)), _fmt(val - ref)])
        return header, rows

    if fig_id == "F4_TildeTau":
        header = ["part", "z", "rho", "log10_tilde_tau", "tilde_tau_minus_tau"]
        rho_max = _F4_W / _F4_C3
        rows = []
        for i in range(51):
            z = i * 0.1
            for j in range(1, 101):
                rho = rho_max * j / 101.0
                val = tilde_tau(rho, z, _F4_W, _F4_C1, _F4_C3)
                rows.append(["contour", _fmt(z), _fmt(rho), _fmt(math.log10(val)), _fmt(val - tau(z))])
        ref = tau(0.0)
        for j in range(1, 201):
            rho = rho_max * j / 201.0
            val = tilde_tau(rho, 0.0, _F4_W, _F4_C1, _F4_C3)
            rows.append(["slice", _fmt(0.0), _fmt(rho), _fmt(math.log10(val)), _fmt(val - ref)])
        return header, rows

    if fig_id == "F5_Coeffs":
        header = ["delta", "log10_c4_42", "log10_c5_42", "log10_c4_46", "log10_c5_46"]
        rows = []
        for i in range(89):
            delta = (2 + i) / 100.0
            cmp_ = bounds.compare_coefficients(delta)
            rows.append(
                [
                    _fmt(delta),
                    _fmt(math.log10(cmp_.c4_42)),
                    _fmt(math.log10(cmp_.c5_42)),
                    _fmt(math.log10(cmp_.c4_46)),
                    _fmt(math.log10(cmp_.c5_46)),
                ]
            )
        return header, rows

    raise ValueError(f"unknown figure id {fig_id!r}; known: {FIGURE_IDS}")


def emit_figure_data(fig_id: str, out_path: str) -> str:
    """Write one figure's CSV; deterministic, no randomness involved."""
    header, rows = _figure_rows(fig_id)
    lines = [f"# figure={fig_id} seed=0", ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    parent = os.path.dirname(os.path.abspath(out_path))
    os.makedirs(parent, exist_ok=True)
    _write_lines(out_path, lines)
    return out_path
