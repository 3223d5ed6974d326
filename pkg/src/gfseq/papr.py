"""Peak-to-average power ratio of column sequences over M subcarriers.

The multicarrier signal of a length-M sequence s is p(t) = sum_m s_m e^{j2pi m t}
for t in [0, 1). The continuous peak is approximated on L_os * M equispaced
sample points via a zero-padded inverse DFT; the ratio is normalized by the
sequence energy sum |s_m|^2, which equals the paper convention for unimodular
entries and makes the metric scale-invariant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PaprConfig:
    """Oversampling factor for the peak search (power of two so grids nest)."""

    oversampling: int = 16

    def __post_init__(self):
        l = self.oversampling
        if l < 1 or (l & (l - 1)) != 0:
            raise ValueError("oversampling must be a power of two >= 1")


@dataclass(frozen=True)
class CcdfCurve:
    """Empirical P(PAPR > threshold) over a set of columns, thresholds in dB."""

    thresholds_db: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.thresholds_db, dtype=np.float64)
        pr = np.asarray(self.probabilities, dtype=np.float64)
        if th.shape != pr.shape or th.ndim != 1:
            raise ValueError("thresholds and probabilities must be 1-D and aligned")
        if np.any(np.diff(th) < 0):
            raise ValueError("thresholds must be ascending")
        if np.any(pr < 0) or np.any(pr > 1) or np.any(np.diff(pr) > 0):
            raise ValueError("probabilities must be non-increasing within [0, 1]")
        th.setflags(write=False)
        pr.setflags(write=False)
        object.__setattr__(self, "thresholds_db", th)
        object.__setattr__(self, "probabilities", pr)


def papr(s: np.ndarray, cfg: PaprConfig = PaprConfig()) -> float:
    """PAPR of one sequence as a linear ratio in [1, M]."""
    s = np.asarray(s, dtype=np.complex128).reshape(-1)
    return float(column_paprs(s[:, None], cfg)[0])


def papr_db(s: np.ndarray, cfg: PaprConfig = PaprConfig()) -> float:
    """PAPR of one sequence in dB."""
    return to_db(papr(s, cfg))


def to_db(ratio) -> float:
    return 10.0 * np.log10(ratio)


def column_paprs(mat: np.ndarray, cfg: PaprConfig = PaprConfig()) -> np.ndarray:
    """Linear PAPR of every column of an M x N matrix in one batched transform."""
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] < 1:
        raise ValueError("expected an M x N matrix with M >= 1")
    energy = np.sum(np.abs(mat) ** 2, axis=0)
    if np.any(energy == 0.0):
        raise ValueError("zero column: PAPR undefined")
    m = mat.shape[0]
    nfft = cfg.oversampling * m
    # ifft(x, n)[k] * n = sum_m x_m e^{j2pi m k/n}: the signal at t_k = k/n.
    sig = np.fft.ifft(mat, n=nfft, axis=0)
    peak = np.max(np.abs(sig) ** 2, axis=0) * nfft**2
    return peak / energy


def cost_f2(a, delta: float, cfg: PaprConfig = PaprConfig()) -> float:
    """Mean linear PAPR of the top-delta-percent worst columns.

    The top set holds floor(delta*N/100) columns; boundary ties are broken by
    ascending column index.
    """
    return _cost_f2_from_paprs(column_paprs(a.matrix, cfg), delta)


def top_delta_count(n: int, delta: float) -> int:
    if not 0.0 < delta <= 100.0:
        raise ValueError("delta must lie in (0, 100]")
    k = int(np.floor(delta * n / 100.0))
    if k < 1:
        raise ValueError(f"delta={delta} selects no columns out of {n}")
    return k


def _cost_f2_from_paprs(paprs: np.ndarray, delta: float) -> float:
    k = top_delta_count(paprs.size, delta)
    order = np.lexsort((np.arange(paprs.size), -paprs))
    return float(np.mean(paprs[order[:k]]))


def max_papr(a, cfg: PaprConfig = PaprConfig()) -> float:
    """Largest column PAPR (linear ratio)."""
    return float(np.max(column_paprs(a.matrix, cfg)))


def ccdf(a, cfg: PaprConfig = PaprConfig(), thresholds_db: np.ndarray | None = None) -> CcdfCurve:
    """Empirical exceedance curve of the column PAPRs at the given dB thresholds.

    Without explicit thresholds, a 0.1 dB grid from 0 dB up to just past the
    maximum column PAPR is used.
    """
    vals_db = to_db(column_paprs(a.matrix, cfg))
    if thresholds_db is None:
        top = np.ceil(vals_db.max() * 10.0) / 10.0 + 0.1
        thresholds_db = np.round(np.arange(0.0, top + 1e-9, 0.1), 10)
    thresholds_db = np.asarray(thresholds_db, dtype=np.float64)
    probs = np.mean(vals_db[None, :] > thresholds_db[:, None], axis=1)
    return CcdfCurve(thresholds_db, probs)
