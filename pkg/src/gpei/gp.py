"""Gaussian-process prior sampling, posterior inference, and information-gain accounting.

The posterior follows the standard conjugate form: with kernel matrix K_t,
cross-covariances k_t(x), noise variance s2 and observations y,

    mu_t(x)     = k_t(x)^T (K_t + s2*I)^{-1} y
    sigma_t^2(x) = k(x, x) - k_t(x)^T (K_t + s2*I)^{-1} k_t(x)

Factorizations go through Cholesky with a small escalating diagonal jitter,
since squared-exponential Gram matrices on fine grids are numerically
singular.  States are immutable; ``update`` returns a fresh state obtained by
refitting on the augmented data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from . import kernels
from .kernels import KernelSpec

JITTER_START = 1e-10
JITTER_MAX = 1e-6

# Below this the predictive sd is treated as exactly zero by callers that
# need to divide by it.
SIGMA_FLOOR = 1e-12


class FactorizationError(RuntimeError):
    """Cholesky failed even after jitter escalation."""


def chol_with_jitter(K: np.ndarray) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor of K + jitter*I, escalating jitter 1e-10 .. 1e-6."""
    jitter = JITTER_START
    n = K.shape[0]
    eye = np.eye(n)
    while jitter <= JITTER_MAX:
        try:
            return np.linalg.cholesky(K + jitter * eye), jitter
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise FactorizationError(
        f"Cholesky failed for {n}x{n} matrix after escalating jitter to {JITTER_MAX:g}"
    )


@dataclass(frozen=True)
class GpState:
    """Immutable fitted posterior.

    ``chol`` is the lower Cholesky factor of K_t + (noise_var + jitter)*I and
    ``alpha`` the presolved (K_t + noise_var*I)^{-1} y (jitter included).
    """

    kernel: KernelSpec
    X: np.ndarray
    y: np.ndarray
    noise_var: float
    chol: np.ndarray
    alpha: np.ndarray
    jitter: float

    @property
    def t(self) -> int:
        return self.X.shape[0]


def fit(kernel: KernelSpec, X, y, noise_var: float) -> GpState:
    """Fit the GP posterior on (X, y) with observation-noise variance noise_var."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"X must be 2-d, got shape {X.shape}")
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ValueError(f"y must be 1-d with one entry per row of X, got {y.shape} for {X.shape}")
    if not (np.isfinite(noise_var) and noise_var >= 0):
        raise ValueError(f"noise_var must be >= 0, got {noise_var!r}")
    if X.shape[0] == 0:
        empty = np.zeros((0, 0))
        return GpState(kernel, X.copy(), y.copy(), float(noise_var), empty, np.zeros(0), 0.0)
    K = kernels.gram(kernel, X) + noise_var * np.eye(X.shape[0])
    L, jitter = chol_with_jitter(K)
    alpha = solve_triangular(L.T, solve_triangular(L, y, lower=True), lower=False)
    return GpState(kernel, X.copy(), y.copy(), float(noise_var), L, alpha, jitter)


def posterior_batch(state: GpState, Q) -> tuple[np.ndarray, np.ndarray]:
    """Posterior mean and sd at each row of Q.  sd is clipped into [0, 1]."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2:
        raise ValueError(f"query points must be 2-d, got shape {Q.shape}")
    n = Q.shape[0]
    if state.t == 0:
        return np.zeros(n), np.ones(n)
    kx = kernels.cross_matrix(state.kernel, state.X, Q)
    mu = kx.T @ state.alpha
    v = solve_triangular(state.chol, kx, lower=True)
    var = 1.0 - np.sum(v * v, axis=0)
    sigma = np.sqrt(np.clip(var, 0.0, 1.0))
    return mu, sigma


def posterior(state: GpState, x) -> tuple[float, float]:
    """Posterior (mean, sd) at a single point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"x must be a 1-d point, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    mu, sigma = posterior_batch(state, x[None, :])
    return float(mu[0]), float(sigma[0])


def update(state: GpState, x_new, y_new: float) -> GpState:
    """Return the posterior refitted with one more observation."""
    x_new = np.asarray(x_new, dtype=float)
    if x_new.ndim != 1:
        raise ValueError(f"x_new must be a 1-d point, got shape {x_new.shape}")
    if state.t > 0 and x_new.shape[0] != state.X.shape[1]:
        raise ValueError(f"dimension mismatch: state is {state.X.shape[1]}-d, x_new is {x_new.shape[0]}-d")
    X = np.vstack([state.X, x_new[None, :]]) if state.t > 0 else x_new[None, :]
    y = np.append(state.y, float(y_new))
    return fit(state.kernel, X, y, state.noise_var)


@dataclass(frozen=True)
class PriorSample:
    """A draw of the latent objective on a finite grid.

    The grid doubles as the optimizer's candidate set, so the minimum
    ``f_star``, its index, and the sup-norm ``f_abs_max`` are exact.
    """

    grid: np.ndarray
    f: np.ndarray
    f_star: float
    x_star_idx: int
    f_abs_max: float


def sample_prior(kernel: KernelSpec, grid, seed: int) -> PriorSample:
    """Draw f = L z on the grid, with L the jittered Cholesky factor of the
    grid Gram matrix and z standard normal from a PCG64 generator seeded with
    ``seed``.  Deterministic given (kernel, grid, seed)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 2 or grid.shape[0] < 1:
        raise ValueError(f"grid must be a non-empty 2-d array, got shape {grid.shape}")
    L, _ = chol_with_jitter(kernels.gram(kernel, grid))
    z = np.random.default_rng(int(seed)).standard_normal(grid.shape[0])
    f = L @ z
    idx = int(np.argmin(f))
    return PriorSample(grid=grid, f=f, f_star=float(f[idx]), x_star_idx=idx, f_abs_max=float(np.max(np.abs(f))))


def info_gain(sigma_at_next, noise_var: float) -> float:
    """Empirical information gain 0.5 * sum log(1 + sigma^2_i / noise_var).

    ``sigma_at_next`` holds the predictive sds sigma_{i-1}(x_i) of the visited
    sequence.  Undefined for noiseless observations.
    """
    if not (np.isfinite(noise_var) and noise_var > 0):
        raise ValueError(f"noise_var must be > 0, got {noise_var!r}")
    s = np.asarray(sigma_at_next, dtype=float)
    if s.size == 0:
        return 0.0
    if np.any(s < 0) or np.any(s > 1) or not np.all(np.isfinite(s)):
        raise ValueError("sigma entries must lie in [0, 1]")
    return float(0.5 * np.sum(np.log1p(s * s / noise_var)))


def variance_sum_check(sigma_at_next, noise_var: float) -> tuple[float, float, bool]:
    """Check sum sigma^2_{i-1}(x_i) <= (2/log(1+1/noise_var)) * info_gain.

    The right side uses the empirical information gain, which lower-bounds the
    maximum information gain, so the inequality must hold deterministically.
    """
    s = np.asarray(sigma_at_next, dtype=float)
    gain = info_gain(s, noise_var)
    lhs = float(np.sum(s * s))
    rhs = (2.0 / np.log1p(1.0 / noise_var)) * gain
    return lhs, rhs, bool(lhs <= rhs + 1e-9)
