"""Analytic write-latency layer for the drift-diffusion device model.

Under dG = mu dt + sigma dW the open-loop write time for a conductance step
delta_g is deterministic, T = delta_g/mu, with a Gaussian end state; the
closed-loop (verified) write time is the first passage time of the drifted
Wiener process, inverse-Gaussian IG(delta_g/mu, (delta_g/sigma)^2).  Matrices
are written row by row with all cells of a row in parallel, which gives the
logarithmic upper bounds on the expected total write time evaluated here and
checked by Monte Carlo.

The closed forms use G_max with a zero G_min convention; for device models
with g_min > 0 the full range g_max - g_min is substituted and the returned
metadata flags it.
"""

import math
from dataclasses import dataclass

import numpy as np

from imbb.crossbar import CrossbarArray, ConductanceTargets
from imbb.device import DeviceModel, drift_params

SCHEMES = ("without_verification", "with_verification")


@dataclass
class LatencyBound:
    scheme: str
    n_t: int
    n_r: int
    bound: float  # seconds
    g_max_is_range: bool = True  # g_min > 0 presets use the full range as G_max


def wwov_end_state(delta_g: float, model: DeviceModel):
    """Open-loop write of a conductance step: (time, end mean, end variance).

    The end state is reported as displacement from the starting conductance:
    G(T) - G(0) is Gaussian with mean delta_g and variance sigma^2*delta_g/mu.
    """
    if delta_g < 0:
        raise ValueError("delta_g must be non-negative")
    mu, sigma, _ = drift_params(model)
    t = delta_g / mu
    return t, delta_g, sigma ** 2 * delta_g / mu


def sample_fpt(delta_g: float, model: DeviceModel, rng: np.random.Generator,
               size=None):
    """Draw first-passage times, IG(delta_g/mu, (delta_g/sigma)^2).

    Uses the Michael-Schucany-Haas transformation: square a standard normal,
    solve the quadratic for the smaller root, and accept it with probability
    m/(m + root), otherwise return m^2/root.
    """
    if delta_g <= 0:
        raise ValueError("delta_g must be positive")
    mu, sigma, _ = drift_params(model)
    m = delta_g / mu
    if sigma == 0:
        return m if size is None else np.full(size, m)
    lam = (delta_g / sigma) ** 2
    shape = () if size is None else size
    y = rng.standard_normal(shape) ** 2
    x = m + m * m * y / (2 * lam) - (m / (2 * lam)) * np.sqrt(
        4 * m * lam * y + (m * y) ** 2)
    u = rng.random(shape)
    out = np.where(u <= m / (m + x), x, m * m / np.maximum(x, 1e-300))
    return float(out) if size is None else out


def _norm_cdf(x):
    x = np.asarray(x, dtype=float)
    erf = np.vectorize(math.erf, otypes=[float])
    return 0.5 * (1.0 + erf(x / math.sqrt(2.0)))


def _log_norm_cdf_neg(b):
    """log Phi(-b) for b >= 0, safe for large b (tail asymptotic)."""
    b = np.asarray(b, dtype=float)
    small = b < 8.0
    out = np.empty_like(b)
    out[small] = np.log(np.maximum(_norm_cdf(-b[small]), 1e-300))
    big = b[~small]
    out[~small] = (-0.5 * big ** 2 - np.log(big)
                   - 0.5 * math.log(2 * math.pi) + np.log1p(-1.0 / big ** 2))
    return out


def ig_cdf(t, mean: float, lam: float):
    """Closed-form CDF of IG(mean, lam), overflow-safe in the second term."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    a = np.sqrt(lam / tp) * (tp / mean - 1.0)
    b = np.sqrt(lam / tp) * (tp / mean + 1.0)
    out[pos] = _norm_cdf(a) + np.exp(2.0 * lam / mean + _log_norm_cdf_neg(b))
    return np.clip(out, 0.0, 1.0)


def latency_bound(scheme: str, n_t: int, n_r: int,
                  model: DeviceModel) -> LatencyBound:
    """Closed-form upper bound on the expected total write time."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if n_r < 1:
        raise ValueError("n_r must be >= 1")
    if n_t < 2:
        raise ValueError("the bound derivation requires n_t >= 2")
    mu, sigma, _ = drift_params(model)
    g_max = model.g_range
    if scheme == "without_verification":
        ln_nt = math.log(n_t)
        val = (2 * math.sqrt(2) * g_max) / (3 * mu) * n_r * (
            math.sqrt(ln_nt) + 1.0 / (math.sqrt(math.pi) * ln_nt))
    else:
        # Piecewise per the derivation's case condition (the two branches
        # meet continuously at the boundary); the square-root branch is only
        # established on its side of the condition, so a blind min over both
        # is not a valid bound.
        ln4 = math.log(4 * n_t)
        if sigma == 0:
            per_row = (2 * math.sqrt(2) * g_max) / (3 * mu) * math.sqrt(ln4)
        elif ln4 <= (mu ** 2 / (2 * sigma ** 2)) * (g_max / (3 * sigma)) ** 2:
            per_row = (2 * math.sqrt(2) * g_max) / (3 * mu) * math.sqrt(ln4)
        else:
            per_row = (2 * sigma ** 2 / mu ** 2) * ln4 + g_max ** 2 / (9 * sigma ** 2)
        val = 2 * n_r * per_row
    return LatencyBound(scheme, n_t, n_r, val, g_max_is_range=model.g_min > 0)


def _sample_delta_g(n_r, n_t, g_max, rng):
    """Per-cell conductance steps: |N(0, G_max^2/9)| (three-sigma scaling)."""
    return np.abs(rng.normal(0.0, g_max / 3.0, (n_r, 2 * n_t)))


def mc_write_latency(n_t: int, n_r: int, model: DeviceModel, scheme: str,
                     mode: str, trials: int, rng: np.random.Generator):
    """Monte Carlo total write time for a real-mapped N_r x N_t matrix.

    Returns (mean, ci95); ci95 is NaN when trials == 1 (no spread estimate).
    analytic mode uses the continuous model (no clamping, reads or
    discreteness); discrete mode programs an actual crossbar and reports the
    pure write-pulse latency, so the closed-form bounds stay comparable.
    """
    if mode not in ("analytic", "discrete"):
        raise ValueError(f"unknown mode {mode!r}")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mu, sigma, _ = drift_params(model)
    g_max = model.g_range
    samples = np.empty(trials)
    for trial in range(trials):
        dg = _sample_delta_g(n_r, n_t, g_max, rng)
        if mode == "analytic":
            if scheme == "without_verification":
                t_cell = dg / mu
            else:
                t_cell = _fpt_matrix(dg, mu, sigma, rng)
            samples[trial] = 2.0 * t_cell.max(axis=1).sum()
        else:
            samples[trial] = _discrete_trial(dg, model, scheme, rng)
    mean = float(samples.mean())
    ci95 = math.nan if trials == 1 else float(
        1.96 * samples.std(ddof=1) / math.sqrt(trials))
    return mean, ci95


def _fpt_matrix(dg, mu, sigma, rng):
    """Vectorized IG draws for a matrix of conductance steps."""
    if sigma == 0:
        return dg / mu
    m = dg / mu
    lam = (dg / sigma) ** 2
    y = rng.standard_normal(dg.shape) ** 2
    x = m + m * m * y / (2 * lam) - (m / (2 * lam)) * np.sqrt(
        4 * m * lam * y + (m * y) ** 2)
    u = rng.random(dg.shape)
    return np.where(u <= m / (m + x), x, m * m / np.maximum(x, 1e-300))


def _discrete_trial(dg, model, scheme, rng):
    n_r, two_nt = dg.shape
    array = CrossbarArray(n_r, two_nt, model, k=1)
    tgt = ConductanceTargets(
        np.clip(model.g_min + dg, model.g_min, model.g_max),
        np.full(dg.shape, model.g_min), alpha=1.0)
    report = array.program(tgt, scheme, rng)
    return 2.0 * report.write_latency
