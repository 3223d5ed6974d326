"""Complex sequence-set algebra: unitary generators, row subsampling, masking,
and Gram/coherence/Welch-distance metrics.

A sequence set is an M x N complex matrix whose columns are candidate
sequences. Sets built from a (unitary kind, index set, mask) descriptor can be
regenerated deterministically from the descriptor alone.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

FOURIER = "fourier"
ZC = "zc"

_KINDS = (FOURIER, ZC)


@dataclass(frozen=True)
class UnitaryKind:
    """Identifies one of the supported N x N unimodular unitary generators."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown unitary kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if self.kind == ZC and self.n % 2 != 0:
            raise ValueError("ZC matrix requires even dimension")


@dataclass(frozen=True)
class IndexSet:
    """M distinct row indices from [0, n), stored sorted ascending."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in sorted(self.indices))
        object.__setattr__(self, "indices", idx)
        if len(set(idx)) != len(idx):
            raise ValueError("indices must be distinct")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise ValueError(f"indices must lie in [0, {self.n})")
        if len(idx) > self.n:
            raise ValueError("cannot select more rows than the dimension")

    def __len__(self):
        return len(self.indices)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)


@dataclass(frozen=True)
class MaskSequence:
    """Per-row phase mask: M integers a_m in Z_q, row m scaled by e^{j2pi a_m/q}."""

    q: int
    phases: tuple[int, ...]

    def __post_init__(self):
        ph = tuple(int(a) for a in self.phases)
        object.__setattr__(self, "phases", ph)
        if self.q < 1:
            raise ValueError("alphabet size must be positive")
        if any(a < 0 or a >= self.q for a in ph):
            raise ValueError(f"mask phases must lie in [0, {self.q})")

    def __len__(self):
        return len(self.phases)

    def phasors(self) -> np.ndarray:
        a = np.asarray(self.phases, dtype=np.float64)
        return np.exp(2j * np.pi * a / self.q)


@dataclass(frozen=True)
class Descriptor:
    """Generative recipe for a sequence set: unitary kind, row selection, mask."""

    kind: UnitaryKind
    omega: IndexSet
    mask: MaskSequence | None = None

    def __post_init__(self):
        if self.omega.n != self.kind.n:
            raise ValueError("index set dimension does not match the unitary")
        if self.mask is not None and len(self.mask) != len(self.omega):
            raise ValueError("mask length does not match the number of selected rows")


@dataclass(frozen=True)
class SequenceSet:
    """An M x N matrix of column sequences, optionally with its descriptor."""

    matrix: np.ndarray
    descriptor: Descriptor | None = None
    label: str = ""

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2:
            raise ValueError("sequence set matrix must be 2-D")
        if not np.all(np.isfinite(mat)):
            raise ValueError("sequence set entries must be finite")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


def fourier_matrix(n: int) -> np.ndarray:
    """N x N matrix with entry (k, l) = exp(-j 2 pi k l / N), 0-based."""
    if n < 1:
        raise ValueError("dimension must be positive")
    k = np.arange(n)
    return np.exp(-2j * np.pi / n * np.outer(k, k))


def zc_matrix(n: int) -> np.ndarray:
    """N x N matrix of all cyclic shifts of the even-length Zadoff-Chu sequence,
    entry (k, l) = exp(-j pi (k + N - l)^2 / N) in 0-based indexing."""
    if n < 2 or n % 2 != 0:
        raise ValueError("ZC matrix requires even dimension >= 2")
    k = np.arange(n)[:, None]
    l = np.arange(n)[None, :]
    return np.exp(-1j * np.pi / n * (k + n - l) ** 2)


def unitary_matrix(kind: UnitaryKind) -> np.ndarray:
    """Generate the unitary matrix named by `kind`."""
    if kind.kind == FOURIER:
        return fourier_matrix(kind.n)
    return zc_matrix(kind.n)


def subsample(u: np.ndarray, omega: IndexSet, kind: UnitaryKind | None = None) -> SequenceSet:
    """Select the rows of `u` listed in `omega` (ascending) and scale by 1/sqrt(M).

    If `kind` names the generator that produced `u`, the descriptor is recorded
    so the result can be regenerated without the matrix.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square matrix")
    if omega.n != u.shape[0]:
        raise ValueError("index set dimension does not match the matrix")
    if len(omega) == 0:
        raise ValueError("index set is empty")
    if kind is not None and kind.n != u.shape[0]:
        raise ValueError("unitary kind dimension does not match the matrix")
    m = len(omega)
    a = u[omega.as_array()] / np.sqrt(m)
    descriptor = Descriptor(kind, omega) if kind is not None else None
    label = f"{kind.kind}-partial" if kind is not None else "partial"
    return SequenceSet(a, descriptor, label)


def apply_mask(a: SequenceSet, v: MaskSequence) -> SequenceSet:
    """Multiply row m of `a` by the unit phasor e^{j 2 pi v_m / q}.

    The Gram matrix is unchanged: diag(v)* diag(v) = I.
    """
    if len(v) != a.m:
        raise ValueError("mask length does not match the number of rows")
    masked = v.phasors()[:, None] * a.matrix
    descriptor = None
    if a.descriptor is not None:
        descriptor = replace(a.descriptor, mask=v)
    label = a.label + "+mask" if a.label else "masked"
    return SequenceSet(masked, descriptor, label)


def reconstruct(descriptor: Descriptor) -> SequenceSet:
    """Regenerate the sequence set from its descriptor (deterministic, no RNG)."""
    a = subsample(unitary_matrix(descriptor.kind), descriptor.omega, descriptor.kind)
    if descriptor.mask is not None:
        a = apply_mask(a, descriptor.mask)
    return a


def gram(a: SequenceSet) -> np.ndarray:
    """Return A* A (N x N, Hermitian; diagonal = squared column norms)."""
    return a.matrix.conj().T @ a.matrix


def coherence(a: SequenceSet) -> float:
    """Largest normalized inner product between distinct columns, in [0, 1]."""
    if a.n < 2:
        raise ValueError("coherence needs at least two columns")
    norms = np.linalg.norm(a.matrix, axis=0)
    if np.any(norms == 0.0):
        raise ValueError("zero column: coherence undefined")
    g = np.abs(gram(a)) / np.outer(norms, norms)
    np.fill_diagonal(g, 0.0)
    return float(g.max())


def welch_offdiag_target(m: int, n: int) -> float:
    """Welch-bound magnitude sqrt((N-M)/(M(N-1))) for an M x N unit-norm frame."""
    if n < 2 or m < 1 or m > n:
        raise ValueError("need 1 <= M <= N and N >= 2")
    return float(np.sqrt((n - m) / (m * (n - 1))))


def welch_cost_f1(a: SequenceSet) -> float:
    """RMS-sense distance between abs(A* A) and the Welch-bound target Gram.

    The target has unit diagonal and constant off-diagonal entries
    sqrt((N-M)/(M(N-1))); the distance is normalized by sqrt(N(N-1)).
    Zero exactly when abs(A* A) meets the target, e.g. at M = N for a
    unitary input.
    """
    return _f1_from_matrix(a.matrix)


def _f1_from_matrix(mat: np.ndarray) -> float:
    m, n = mat.shape
    g = np.abs(mat.conj().T @ mat)
    g -= welch_offdiag_target(m, n)
    d = np.einsum("ii->i", g)
    d -= 1.0 - welch_offdiag_target(m, n)
    return float(np.linalg.norm(g) / np.sqrt(n * (n - 1)))


def _coherence_from_matrix(mat: np.ndarray) -> float:
    norms = np.linalg.norm(mat, axis=0)
    g = np.abs(mat.conj().T @ mat) / np.outer(norms, norms)
    np.fill_diagonal(g, 0.0)
    return float(g.max())
