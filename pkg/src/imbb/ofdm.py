"""Crossbar-hosted DFT/IDFT operators and cyclic-prefix handling.

The unitary DFT matrix W (entries of magnitude 1/sqrt(n_c)) is real-mapped
to a 2n_c x 2n_c block matrix and programmed into one differential array;
because W is unitary the inverse transform is the same array driven through
the transposed map.  Applying the operator is a single analog MVM, so its
latency is one read pulse regardless of n_c.
"""

from dataclasses import dataclass

import numpy as np

from imbb.crossbar import CrossbarArray, ProgramReport, encode_targets
from imbb.device import DeviceModel
from imbb.linmap import real_map_matrix, real_map_vector, unmap_vector


@dataclass
class DftOperator:
    n_c: int
    direction: str  # 'forward' or 'inverse'
    array: CrossbarArray
    alpha_dft: float


def dft_matrix(n_c: int) -> np.ndarray:
    """Unitary DFT matrix, W W^H = I."""
    k = np.arange(n_c)
    return np.exp(-2j * np.pi * np.outer(k, k) / n_c) / np.sqrt(n_c)


def build_dft_operator(n_c: int, direction: str, model: DeviceModel,
                       scheme: str, rng: np.random.Generator,
                       k: int = 1, exact: bool = False):
    """Program the real-mapped DFT into a crossbar; returns (op, report).

    exact=True writes the targets directly (ideal-device oracle path).
    The deterministic matrix is scaled with sigma_value = max|entry|/3 so
    the largest entry uses the full conductance range.
    """
    if n_c < 2 or (n_c & (n_c - 1)) != 0:
        raise ValueError("n_c must be a power of two >= 2")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    w = real_map_matrix(dft_matrix(n_c))
    if direction == "inverse":
        w = w.T
    sigma_value = np.abs(w).max() / 3.0
    targets = encode_targets(w, model, sigma_value)
    array = CrossbarArray(2 * n_c, 2 * n_c, model, k=k)
    if exact:
        report = array.program_exact(targets)
    else:
        report = array.program(targets, scheme, rng)
    return DftOperator(n_c, direction, array, targets.alpha), report


def dft_apply(op: DftOperator, x, rng: np.random.Generator,
              aggregate_noise: bool = False) -> np.ndarray:
    """One-step transform of a complex vector through the crossbar."""
    x = np.asarray(x, dtype=complex)
    if x.shape != (op.n_c,):
        raise ValueError(f"expected a length-{op.n_c} vector")
    out = op.array.mvm_read(real_map_vector(x), rng, aggregate_noise=aggregate_noise)
    return unmap_vector(out / op.alpha_dft)


def dft_apply_block(op: DftOperator, x_block, rng: np.random.Generator) -> np.ndarray:
    """Transform many vectors at once (columns of an (n_c, m) block).

    Equivalent to m dft_apply calls with aggregated read noise; one read
    pulse of latency is charged per column.
    """
    x_block = np.asarray(x_block, dtype=complex)
    if x_block.ndim != 2 or x_block.shape[0] != op.n_c:
        raise ValueError(f"expected an ({op.n_c}, m) block")
    v = np.vstack([x_block.real, x_block.imag])
    out = op.array.decoded() @ v
    m = op.array.model
    if m.sigma_read > 0:
        std = m.sigma_read * np.sqrt(2.0 * (v ** 2).sum(axis=0) / op.array.k)
        out = out + std * rng.standard_normal(out.shape)
    g_total = (op.array.effective_plus() + op.array.effective_minus()).sum(axis=(0, 1))
    op.array.read_energy += float((v ** 2 * g_total[:, None]).sum()) * m.pulse_width
    op.array.read_latency += m.pulse_width * x_block.shape[1]
    op.array.read_pulses += x_block.shape[1]
    n = op.n_c
    return (out[:n] + 1j * out[n:]) / op.alpha_dft


def cyclic_prefix(x, cp_len: int, mode: str) -> np.ndarray:
    """Add prepends the last cp_len samples; remove drops the first cp_len."""
    x = np.asarray(x)
    if cp_len < 0 or cp_len >= x.shape[0]:
        raise ValueError("cp_len must satisfy 0 <= cp_len < length")
    if mode == "add":
        return np.concatenate([x[x.shape[0] - cp_len:], x], axis=0)
    if mode == "remove":
        return x[cp_len:]
    raise ValueError(f"unknown mode {mode!r}")
