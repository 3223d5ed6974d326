"""Comparison sequence families: complex Gaussian, MUSA 3-level, and
prime-length multi-root Zadoff-Chu sets."""

from __future__ import annotations

import numpy as np

from . import papr as papr_mod
from .seqcore import SequenceSet, _coherence_from_matrix as _coherence

GAUSSIAN = "gaussian"
MUSA = "musa"
ZC_PRIME = "zcprime"

# 3-level MUSA constellation: real and imaginary parts each in {-1, 0, 1}.
_MUSA_ALPHABET = np.array(
    [0, 1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j], dtype=np.complex128
) / np.sqrt(12.0)


def gaussian_set(m: int, n: int, trials: int, rng: np.random.Generator) -> SequenceSet:
    """Lowest-coherence matrix among `trials` i.i.d. complex Gaussian draws.

    Entries have zero mean and variance 1/M (1/(2M) per real dimension);
    columns are left unnormalized.
    """
    if m < 1 or n < 1 or trials < 1:
        raise ValueError("need m, n, trials >= 1")
    scale = np.sqrt(1.0 / (2.0 * m))
    best = None
    best_coh = np.inf
    for _ in range(trials):
        mat = scale * (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
        coh = _coherence(mat)
        if coh < best_coh:
            best, best_coh = mat, coh
    return SequenceSet(best, label=GAUSSIAN)


def musa_set(m: int, n: int, trials: int, rng: np.random.Generator) -> SequenceSet:
    """Lowest-coherence matrix among `trials` draws from the 9-point MUSA
    constellation (1/sqrt(12))*[+-1+-j, +-1, +-j, 0]; all-zero columns are
    redrawn so coherence stays defined."""
    if m < 1 or n < 1 or trials < 1:
        raise ValueError("need m, n, trials >= 1")
    best = None
    best_coh = np.inf
    for _ in range(trials):
        sym = rng.integers(0, _MUSA_ALPHABET.size, size=(m, n))
        dead = np.flatnonzero(np.all(sym == 0, axis=0))
        while dead.size:
            sym[:, dead] = rng.integers(0, _MUSA_ALPHABET.size, size=(m, dead.size))
            dead = dead[np.all(sym[:, dead] == 0, axis=0)]
        mat = _MUSA_ALPHABET[sym]
        coh = _coherence(mat)
        if coh < best_coh:
            best, best_coh = mat, coh
    return SequenceSet(best, label=MUSA)


def closest_prime(m: int) -> int:
    """Prime nearest to m; an equidistant tie picks the smaller prime."""
    if m < 2:
        raise ValueError("no prime near values below 2")
    d = 0
    while True:
        if m - d >= 2 and _is_prime(m - d):
            return m - d
        if _is_prime(m + d):
            return m + d
        d += 1


def _is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k < 4:
        return True
    if k % 2 == 0:
        return False
    f = 3
    while f * f <= k:
        if k % f == 0:
            return False
        f += 2
    return True


def zc_root_sequence(m_zc: int, u: int) -> np.ndarray:
    """Odd-prime-length ZC root sequence with kth element e^{j pi u k(k+1)/M_zc}."""
    k = np.arange(m_zc)
    return np.exp(1j * np.pi * u / m_zc * k * (k + 1))


def zc_prime_set(m: int, n: int,
                 papr_cfg: papr_mod.PaprConfig = papr_mod.PaprConfig()) -> SequenceSet:
    """Deterministic M_zc x N set from cyclic shifts of multi-root ZC sequences.

    M_zc is the prime closest to `m`. Roots 1..M_zc-1 are ranked by the maximum
    PAPR of the shift matrix they generate (ties to the smaller root); the
    first ceil(N / M_zc) roots contribute their M_zc cyclic shifts each, and
    the first N columns are kept, scaled to unit norm.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    m_zc = closest_prime(m)
    ranked = []
    shift_matrices = {}
    for u in range(1, m_zc):
        c_u = _shift_matrix(zc_root_sequence(m_zc, u))
        shift_matrices[u] = c_u
        ranked.append((float(np.max(papr_mod.column_paprs(c_u, papr_cfg))), u))
    ranked.sort()
    l = int(np.ceil(n / m_zc))
    if l > m_zc - 1:
        raise ValueError(f"{n} columns need {l} roots but only {m_zc - 1} exist")
    roots = [u for _, u in ranked[:l]]
    mat = np.concatenate([shift_matrices[u] for u in roots], axis=1)[:, :n]
    return SequenceSet(mat / np.sqrt(m_zc), label=ZC_PRIME)


def _shift_matrix(seq: np.ndarray) -> np.ndarray:
    # Column s is the sequence cyclically shifted down by s positions.
    k = np.arange(seq.size)
    return seq[(k[:, None] - k[None, :]) % seq.size]
