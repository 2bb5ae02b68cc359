"""Complex-to-real mappings for hosting complex math on real crossbars.

A complex matrix A maps to the real block matrix [[Re A, -Im A], [Im A, Re A]]
and a complex vector x to the stacked real vector [Re x; Im x].  These
mappings commute with addition, multiplication, conjugate transposition and
(regularized) pseudo-inversion, so any complex MVM can be carried out by a
single real MVM on a crossbar.
"""

import numpy as np


def real_map_matrix(a) -> np.ndarray:
    """Map a complex K x L matrix to its real 2K x 2L block equivalent."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def real_map_vector(x) -> np.ndarray:
    """Map a complex vector of length K to the stacked real vector of length 2K."""
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError("expected a 1-D vector")
    return np.concatenate([x.real, x.imag])


def unmap_vector(r) -> np.ndarray:
    """Inverse of real_map_vector: [Re x; Im x] -> x."""
    r = np.asarray(r, dtype=float)
    if r.ndim != 1 or r.size % 2 != 0:
        raise ValueError("stacked real vector must be 1-D with even length")
    k = r.size // 2
    return r[:k] + 1j * r[k:]


def unmap_matrix(m) -> np.ndarray:
    """Recover the complex matrix from its real block equivalent (top row of blocks)."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] % 2 or m.shape[1] % 2:
        raise ValueError("real block matrix must have even dimensions")
    k, l = m.shape[0] // 2, m.shape[1] // 2
    return m[:k, :l] - 1j * m[:k, l:]
