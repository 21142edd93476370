"""The expected-improvement acquisition and the sequential optimization loop.

One loop iteration at step t: maximize EI_t over the finite candidate grid,
observe the chosen point (with additive Gaussian noise when configured),
refit the posterior, and record a trace row.  Acquisition maximization is an
exhaustive scan, which is exact at desk scale and keeps inner-optimizer noise
out of the recorded quantities; ties break to the lowest candidate index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gp, stdnormal
from .config import ExperimentConfig
from .gp import GpState, PriorSample
from .rng import derive_stream_seed

# Stream tags for the per-run substreams (initial design vs noise draws),
# so objective sampling and noise are independently reproducible.
INIT_STREAM = 0x494E4954
NOISE_STREAM = 0x4E4F4953


def improvement(y_plus: float, f_x: float) -> float:
    """max(y_plus - f_x, 0): the amount a function value improves on the incumbent."""
    if not (np.isfinite(y_plus) and np.isfinite(f_x)):
        raise ValueError("improvement requires finite inputs")
    return max(y_plus - f_x, 0.0)


def _ei_from_moments(y_plus: float, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    gap = y_plus - mu
    positive = sigma > gp.SIGMA_FLOOR
    safe = np.where(positive, sigma, 1.0)
    vals = np.asarray(stdnormal.tau(gap / safe)) * safe
    return np.where(positive, vals, np.maximum(gap, 0.0))


def ei(state: GpState, y_plus: float, x) -> float:
    """EI_t(x) = sigma * tau((y_plus - mu)/sigma), degenerating to max(y_plus - mu, 0)
    when the predictive sd underflows."""
    mu, sigma = gp.posterior(state, x)
    return float(_ei_from_moments(float(y_plus), np.asarray(mu), np.asarray(sigma)))


def ei_batch(state: GpState, y_plus: float, candidates) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Posterior moments and EI at every candidate row; the loop's hot path."""
    mu, sigma = gp.posterior_batch(state, candidates)
    return mu, sigma, _ei_from_moments(float(y_plus), mu, sigma)


def argmax_ei(state: GpState, y_plus: float, candidates) -> tuple[int, np.ndarray]:
    """Index and coordinates of the EI-maximizing candidate (lowest index on ties)."""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 2 or candidates.shape[0] < 1:
        raise ValueError("candidates must be a non-empty 2-d array")
    _, _, vals = ei_batch(state, y_plus, candidates)
    idx = int(np.argmax(vals))
    return idx, candidates[idx]


@dataclass(frozen=True)
class TraceRow:
    """Per-iteration record: quantities indexed by t describe the posterior on
    the first t observations and the point x_{t+1} it selects."""

    t: int
    x_next: tuple[float, ...]
    x_next_idx: int
    f_next: float
    y_next: float
    y_plus: float
    mu_next: float
    sigma_next: float
    ei_next: float
    sigma_at_star: float
    r_t: float
    r0_t: float


@dataclass(frozen=True)
class Trace:
    """Immutable record of one optimization run plus its provenance."""

    rows: tuple[TraceRow, ...]
    seed: int
    config_hash: str
    noise_sd: float
    f_star: float
    f_abs_max: float
    x_star_idx: int
    init_indices: tuple[int, ...]
    stopped_early: bool

    def row_at(self, t: int) -> TraceRow:
        for row in self.rows:
            if row.t == t:
                return row
        raise ValueError(f"trace has no row for t={t}")

    def sigma_at_next(self) -> np.ndarray:
        return np.array([row.sigma_next for row in self.rows])


def run(config: ExperimentConfig, sample: PriorSample, seed: int, config_hash: str = "") -> Trace:
    """Execute the optimization loop on one prior draw.

    T0 initial points are drawn uniformly (with replacement) from the grid and
    observed as y = f + eps with eps ~ N(0, noise_sd^2) i.i.d.; afterwards each
    step acquires the EI argmax over the full grid, observes it, refits, and
    records a row.  Stops at budget T, or right after observing a point whose
    acquisition value fell below ``kappa`` when a threshold is configured.
    Bit-identical traces are guaranteed for identical (config, sample, seed).
    """
    if not (1 <= config.T0 <= config.T):
        raise ValueError(f"need 1 <= T0 <= T, got T0={config.T0}, T={config.T}")
    grid = np.asarray(sample.grid, dtype=float)
    if not np.array_equal(grid, config.grid_points()):
        raise ValueError("prior sample grid does not match the config's candidate grid")
    n = grid.shape[0]
    noise_sd = float(config.noise_sd)

    rng_init = np.random.default_rng(derive_stream_seed(seed, INIT_STREAM))
    rng_noise = np.random.default_rng(derive_stream_seed(seed, NOISE_STREAM))

    init_idx = [int(i) for i in rng_init.integers(0, n, size=config.T0)]
    obs_idx = list(init_idx)
    y_obs = [float(sample.f[j] + noise_sd * rng_noise.standard_normal()) for j in obs_idx]

    state = gp.fit(config.kernel, grid[obs_idx], np.array(y_obs), config.noise_var)

    best = int(np.argmin(y_obs))
    y_plus = y_obs[best]
    best_idx = obs_idx[best]

    rows: list[TraceRow] = []
    stopped = False
    for t in range(config.T0, config.T):
        mu, sigma, vals = ei_batch(state, y_plus, grid)
        j = int(np.argmax(vals))
        eps = noise_sd * rng_noise.standard_normal()
        y_new = float(sample.f[j] + eps)
        rows.append(
            TraceRow(
                t=t,
                x_next=tuple(float(c) for c in grid[j]),
                x_next_idx=j,
                f_next=float(sample.f[j]),
                y_next=y_new,
                y_plus=y_plus,
                mu_next=float(mu[j]),
                sigma_next=float(sigma[j]),
                ei_next=float(vals[j]),
                sigma_at_star=float(sigma[sample.x_star_idx]),
                r_t=y_plus - sample.f_star,
                r0_t=float(sample.f[best_idx]) - sample.f_star,
            )
        )
        obs_idx.append(j)
        y_obs.append(y_new)
        if y_new < y_plus:
            y_plus = y_new
            best_idx = j
        state = gp.update(state, grid[j], y_new)
        if config.kappa is not None and rows[-1].ei_next < config.kappa:
            stopped = True
            break

    return Trace(
        rows=tuple(rows),
        seed=int(seed),
        config_hash=config_hash,
        noise_sd=noise_sd,
        f_star=sample.f_star,
        f_abs_max=sample.f_abs_max,
        x_star_idx=sample.x_star_idx,
        init_indices=tuple(init_idx),
        stopped_early=stopped,
    )
