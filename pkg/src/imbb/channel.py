"""Rayleigh MIMO channels, AWGN, unitary pilots and LS estimation."""

from dataclasses import dataclass

import numpy as np


@dataclass
class ChannelRealization:
    """Per-sub-carrier channel matrices, shape (n_c, n_r, n_t)."""

    matrices: np.ndarray
    flat: bool
    sigma_h: float = 1.0 / np.sqrt(2.0)  # per-component std, unit entry power

    @property
    def n_c(self) -> int:
        return self.matrices.shape[0]


def sample_channel(n_t: int, n_r: int, n_c: int, flat: bool,
                   rng: np.random.Generator) -> ChannelRealization:
    """i.i.d. Rayleigh fading: entries CN(0,1); flat replicates one draw."""
    if n_t < 1 or n_r < 1 or n_c < 1:
        raise ValueError("dimensions must be positive")
    s = 1.0 / np.sqrt(2.0)
    if flat:
        h = s * (rng.standard_normal((n_r, n_t)) + 1j * rng.standard_normal((n_r, n_t)))
        mats = np.broadcast_to(h, (n_c, n_r, n_t)).copy()
    else:
        mats = s * (rng.standard_normal((n_c, n_r, n_t))
                    + 1j * rng.standard_normal((n_c, n_r, n_t)))
    return ChannelRealization(mats, flat=flat, sigma_h=s)


def awgn_var(snr_db: float) -> float:
    """Noise variance for unit symbol energy: sigma_n^2 = 1/linear(snr)."""
    return 0.0 if np.isinf(snr_db) else 10.0 ** (-snr_db / 10.0)


def apply_channel(h, x, snr_db: float, rng: np.random.Generator,
                  noise_var: float = None):
    """y = Hx + z with z ~ CN(0, sigma_n^2 I).

    sigma_n^2 defaults to 1/linear(snr_db) (unit symbol energy, unit-power
    channel entries); noise_var overrides it when the caller calibrates the
    noise differently.  x may be a vector or an (n_t, m) block of columns.
    """
    h = np.asarray(h, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if x.shape[0] != h.shape[1]:
        raise ValueError("channel and input dimensions do not match")
    var = awgn_var(snr_db) if noise_var is None else noise_var
    y = h @ x
    if var > 0:
        s = np.sqrt(var / 2.0)
        y = y + s * (rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape))
    return y


def unitary_pilot(n_t: int) -> np.ndarray:
    """Normalized DFT matrix of size n_t: P P^H = I."""
    if n_t < 1:
        raise ValueError("n_t must be positive")
    k = np.arange(n_t)
    return np.exp(-2j * np.pi * np.outer(k, k) / n_t) / np.sqrt(n_t)


def estimate_channel(s, p) -> np.ndarray:
    """LS/ML estimate from a received pilot block: H_hat = S P^H."""
    s = np.asarray(s, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if s.ndim != 2 or p.ndim != 2 or s.shape[1] != p.shape[0] or p.shape[0] != p.shape[1]:
        raise ValueError("pilot dimensions do not match")
    return s @ p.conj().T


def export_csv(channel: ChannelRealization, path):
    """Channel fixture as CSV (subcarrier, rx, tx, re, im)."""
    with open(path, "w") as f:
        f.write("subcarrier,rx,tx,re,im\n")
        n_c, n_r, n_t = channel.matrices.shape
        for k in range(n_c):
            for i in range(n_r):
                for j in range(n_t):
                    v = channel.matrices[k, i, j]
                    f.write(f"{k},{i},{j},{float(v.real)!r},{float(v.imag)!r}\n")


def import_csv(path) -> ChannelRealization:
    data = np.genfromtxt(path, delimiter=",", names=True)
    data = np.atleast_1d(data)
    n_c = int(data["subcarrier"].max()) + 1
    n_r = int(data["rx"].max()) + 1
    n_t = int(data["tx"].max()) + 1
    mats = np.zeros((n_c, n_r, n_t), dtype=complex)
    for row in data:
        mats[int(row["subcarrier"]), int(row["rx"]), int(row["tx"])] = (
            row["re"] + 1j * row["im"])
    flat = bool(n_c > 1 and np.allclose(mats, mats[0]))
    return ChannelRealization(mats, flat=flat)
