"""Gray coding, 16-QAM mapping and the MER/BER metrics.

Conventions (fixed so oracles are reproducible): each 4-bit word is
[i1 i0 q1 q0]; each axis Gray-maps its 2 bits onto the levels
{-3, -1, +1, +3}/sqrt(10), so the constellation has unit average energy and
0000 lands on (-3-3j)/sqrt(10).  Adjacent points differ in exactly one bit.
"""

import math
from dataclasses import dataclass

import numpy as np

_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0]) / math.sqrt(10.0)
# Gray order over 2-bit axis words: 00 01 11 10 walk the levels in order,
# i.e. axis word (b1 b0) -> level index via gray decode.
_GRAY2_TO_INDEX = {0b00: 0, 0b01: 1, 0b11: 2, 0b10: 3}
_INDEX_TO_GRAY2 = {v: k for k, v in _GRAY2_TO_INDEX.items()}


@dataclass
class Metrics:
    mer_db: float  # +inf when the error energy is exactly zero
    ber: float


def bin_to_gray(bits) -> np.ndarray:
    """Reflected Gray code of one word: gray[i] = bin[i-1] XOR bin[i]."""
    bits = np.asarray(bits, dtype=int)
    if bits.ndim != 1 or bits.size < 1:
        raise ValueError("expected a non-empty 1-D bit word")
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    out = bits.copy()
    out[1:] = bits[:-1] ^ bits[1:]
    return out


def gray_to_bin(bits) -> np.ndarray:
    """Inverse Gray code: bin[i] = bin[i-1] XOR gray[i] (prefix XOR)."""
    bits = np.asarray(bits, dtype=int)
    if bits.ndim != 1 or bits.size < 1:
        raise ValueError("expected a non-empty 1-D bit word")
    if not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    return np.bitwise_xor.accumulate(bits)


def qam16_modulate(bits) -> np.ndarray:
    """Map a bit stream (length divisible by 4) to unit-energy 16-QAM symbols."""
    bits = np.asarray(bits, dtype=int)
    if bits.ndim != 1 or bits.size % 4 != 0:
        raise ValueError("bit stream length must be a multiple of 4")
    words = bits.reshape(-1, 4)
    i_word = words[:, 0] * 2 + words[:, 1]
    q_word = words[:, 2] * 2 + words[:, 3]
    idx = np.array([_GRAY2_TO_INDEX[w] for w in range(4)])
    return _LEVELS[idx[i_word]] + 1j * _LEVELS[idx[q_word]]


def qam16_demodulate(symbols) -> np.ndarray:
    """Hard-decision nearest-point demapping back to bits."""
    symbols = np.asarray(symbols, dtype=complex)
    if not np.all(np.isfinite(symbols)):
        raise ValueError("symbols must be finite")
    # nearest level per axis; searchsorted midpoints break ties toward the
    # lower level, which is the smaller Gray index along the axis walk
    mids = (_LEVELS[:-1] + _LEVELS[1:]) / 2.0
    i_idx = np.searchsorted(mids, symbols.real)
    q_idx = np.searchsorted(mids, symbols.imag)
    gray = np.array([_INDEX_TO_GRAY2[i] for i in range(4)])
    i_word = gray[i_idx]
    q_word = gray[q_idx]
    out = np.empty((symbols.size, 4), dtype=int)
    out[:, 0] = i_word >> 1
    out[:, 1] = i_word & 1
    out[:, 2] = q_word >> 1
    out[:, 3] = q_word & 1
    return out.reshape(-1)


def compute_metrics(tx_symbols, rx_symbols, tx_bits, rx_bits) -> Metrics:
    """Modulation error ratio over all symbols plus the bit error ratio."""
    tx_symbols = np.asarray(tx_symbols, dtype=complex)
    rx_symbols = np.asarray(rx_symbols, dtype=complex)
    tx_bits = np.asarray(tx_bits, dtype=int)
    rx_bits = np.asarray(rx_bits, dtype=int)
    if tx_symbols.shape != rx_symbols.shape:
        raise ValueError("symbol arrays must have equal length")
    if tx_bits.shape != rx_bits.shape:
        raise ValueError("bit arrays must have equal length")
    sig = float(np.sum(np.abs(tx_symbols) ** 2))
    err = float(np.sum(np.abs(rx_symbols - tx_symbols) ** 2))
    mer = math.inf if err == 0 else 10.0 * math.log10(sig / err)
    ber = 0.0 if tx_bits.size == 0 else float(np.mean(tx_bits != rx_bits))
    return Metrics(mer_db=mer, ber=ber)
