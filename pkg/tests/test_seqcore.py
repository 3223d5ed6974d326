import numpy as np
import pytest

from gfseq import seqcore
from gfseq.seqcore import (
    Descriptor, IndexSet, MaskSequence, SequenceSet, UnitaryKind,
    apply_mask, coherence, fourier_matrix, gram, reconstruct, subsample,
    unitary_matrix, welch_cost_f1, welch_offdiag_target, zc_matrix,
)


def random_omega(n, m, rng):
    return IndexSet(n, tuple(np.sort(rng.choice(n, size=m, replace=False))))


def random_mask(q, m, rng):
    return MaskSequence(q, tuple(rng.integers(0, q, size=m)))


# --- oracles -----------------------------------------------------------------

def gram_oracle(mat):
    m, n = mat.shape
    g = np.zeros((n, n), dtype=complex)
    for k in range(n):
        for l in range(n):
            g[k, l] = np.sum(np.conj(mat[:, k]) * mat[:, l])
    return g


def coherence_oracle(mat):
    n = mat.shape[1]
    best = 0.0
    for k in range(n):
        for l in range(n):
            if k == l:
                continue
            num = abs(np.vdot(mat[:, k], mat[:, l]))
            best = max(best, num / (np.linalg.norm(mat[:, k]) * np.linalg.norm(mat[:, l])))
    return best


def f1_oracle(mat):
    m, n = mat.shape
    target = np.sqrt((n - m) / (m * (n - 1)))
    total = 0.0
    for k in range(n):
        for l in range(n):
            want = 1.0 if k == l else target
            total += (abs(np.vdot(mat[:, k], mat[:, l])) - want) ** 2
    return np.sqrt(total) / np.sqrt(n * (n - 1))


# --- generators ---------------------------------------------------------------

def test_fourier_trivial_sizes():
    assert np.allclose(fourier_matrix(1), [[1.0]])
    assert np.allclose(fourier_matrix(2), [[1, 1], [1, -1]])


def test_fourier_unitarity_oracle():
    u = fourier_matrix(8)
    assert np.linalg.norm(u @ u.conj().T - 8 * np.eye(8)) / np.linalg.norm(8 * np.eye(8)) < 1e-12


@pytest.mark.parametrize("n", [2, 4, 8, 64, 256])
def test_unitarity_fourier(n):
    u = fourier_matrix(n)
    assert np.linalg.norm(u @ u.conj().T - n * np.eye(n)) / (n * np.sqrt(n)) < 1e-10


@pytest.mark.parametrize("n", [2, 4, 8, 64, 256])
def test_unitarity_zc(n):
    z = zc_matrix(n)
    assert np.linalg.norm(z @ z.conj().T - n * np.eye(n)) / (n * np.sqrt(n)) < 1e-10


def test_zc_first_entry_n2():
    # paper indices k=l=1: exponent is a multiple of 2 pi
    assert zc_matrix(2)[0, 0] == pytest.approx(1.0)


def test_zc_unitary_n4():
    z = zc_matrix(4)
    assert np.linalg.norm(z @ z.conj().T - 4 * np.eye(4)) < 1e-12


def test_zc_unimodular_n256():
    assert np.max(np.abs(np.abs(zc_matrix(256)) - 1.0)) < 1e-12


def test_zc_rejects_odd():
    with pytest.raises(ValueError):
        zc_matrix(63)
    with pytest.raises(ValueError):
        UnitaryKind(seqcore.ZC, 63)


def test_fourier_rejects_nonpositive():
    with pytest.raises(ValueError):
        fourier_matrix(0)


# --- types --------------------------------------------------------------------

def test_index_set_validation():
    assert IndexSet(8, (5, 1, 3)).indices == (1, 3, 5)
    with pytest.raises(ValueError):
        IndexSet(8, (1, 1, 2))
    with pytest.raises(ValueError):
        IndexSet(8, (0, 8))
    with pytest.raises(ValueError):
        IndexSet(2, (0, 1, 1))


def test_mask_validation():
    with pytest.raises(ValueError):
        MaskSequence(4, (0, 4))
    with pytest.raises(ValueError):
        MaskSequence(4, (-1,))
    assert len(MaskSequence(4, (0, 3, 2))) == 3


def test_sequence_set_rejects_nonfinite():
    with pytest.raises(ValueError):
        SequenceSet(np.array([[np.inf + 0j, 1.0]]))


def test_descriptor_consistency():
    kind = UnitaryKind(seqcore.FOURIER, 8)
    with pytest.raises(ValueError):
        Descriptor(kind, IndexSet(4, (0, 1)))
    with pytest.raises(ValueError):
        Descriptor(kind, IndexSet(8, (0, 1)), MaskSequence(8, (0, 1, 2)))


# --- subsample / mask ----------------------------------------------------------

def test_subsample_full_is_orthonormal():
    u = fourier_matrix(4)
    a = subsample(u, IndexSet(4, (0, 1, 2, 3)))
    assert np.allclose(a.matrix, u / 2.0)
    assert np.allclose(gram(a), np.eye(4), atol=1e-12)


def test_subsample_row_extraction():
    u = fourier_matrix(4)
    a = subsample(u, IndexSet(4, (0, 2)))
    r = 1 / np.sqrt(2)
    assert np.allclose(a.matrix[0], r * np.ones(4))
    assert np.allclose(a.matrix[1], r * np.array([1, -1, 1, -1]))


def test_subsample_column_norms():
    rng = np.random.default_rng(0)
    u = np.exp(2j * np.pi * rng.random((16, 16)))  # unimodular, not unitary
    a = subsample(u, random_omega(16, 5, rng))
    assert np.allclose(np.linalg.norm(a.matrix, axis=0), 1.0, atol=1e-12)


def test_subsample_dimension_mismatch():
    with pytest.raises(ValueError):
        subsample(fourier_matrix(4), IndexSet(8, (0, 1)))
    with pytest.raises(ValueError):
        subsample(fourier_matrix(4), IndexSet(4, (0, 1)), UnitaryKind(seqcore.FOURIER, 8))


def test_mask_identity_and_gram_preservation():
    rng = np.random.default_rng(1)
    kind = UnitaryKind(seqcore.FOURIER, 16)
    a = subsample(unitary_matrix(kind), random_omega(16, 6, rng), kind)
    assert np.array_equal(apply_mask(a, MaskSequence(16, (0,) * 6)).matrix, a.matrix)
    v = random_mask(16, 6, rng)
    masked = apply_mask(a, v)
    assert np.linalg.norm(gram(masked) - gram(a)) < 1e-10
    assert masked.descriptor.mask is v


def test_mask_quarter_turns():
    # q=4, a=(1, 2): rows scaled by j and -1
    a = SequenceSet(np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex))
    out = apply_mask(a, MaskSequence(4, (1, 2)))
    assert np.allclose(out.matrix, [[1j, 2j], [-3, -4]])


def test_mask_length_mismatch():
    a = SequenceSet(np.ones((3, 4), dtype=complex))
    with pytest.raises(ValueError):
        apply_mask(a, MaskSequence(4, (0, 1)))


# --- metrics -------------------------------------------------------------------

def test_gram_matches_oracle():
    rng = np.random.default_rng(2)
    mat = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
    a = SequenceSet(mat)
    g = gram(a)
    assert np.max(np.abs(g - gram_oracle(mat))) < 1e-12
    assert np.max(np.abs(g - g.conj().T)) < 1e-12
    assert np.allclose(np.diag(g).imag, 0.0, atol=1e-12)


def test_coherence_trivial_cases():
    kind = UnitaryKind(seqcore.FOURIER, 6)
    full = subsample(unitary_matrix(kind), IndexSet(6, tuple(range(6))), kind)
    assert coherence(full) == pytest.approx(0.0, abs=1e-12)
    dup = SequenceSet(np.array([[1.0, 1.0], [1j, 1j]]))
    assert coherence(dup) == pytest.approx(1.0)


def test_coherence_welch_bound():
    rng = np.random.default_rng(3)
    u = fourier_matrix(16)
    for _ in range(20):
        a = subsample(u, random_omega(16, 5, rng))
        assert coherence(a) >= welch_offdiag_target(5, 16) - 1e-12


def test_coherence_rejects_zero_column():
    with pytest.raises(ValueError):
        coherence(SequenceSet(np.array([[1.0, 0.0], [1.0, 0.0]])))


def test_coherence_matches_oracle():
    rng = np.random.default_rng(4)
    mat = rng.standard_normal((4, 8)) + 1j * rng.standard_normal((4, 8))
    assert coherence(SequenceSet(mat)) == pytest.approx(coherence_oracle(mat), abs=1e-12)


@pytest.mark.parametrize("kind_name", [seqcore.FOURIER, seqcore.ZC])
def test_f1_zero_at_full_sampling(kind_name):
    kind = UnitaryKind(kind_name, 8)
    a = subsample(unitary_matrix(kind), IndexSet(8, tuple(range(8))), kind)
    assert welch_cost_f1(a) == pytest.approx(0.0, abs=1e-12)


def test_f1_offdiag_target_closed_form():
    assert welch_offdiag_target(80, 256) == pytest.approx(np.sqrt(176 / 20400), abs=1e-15)
    assert welch_offdiag_target(80, 256) == pytest.approx(0.09288, abs=5e-6)


def test_f1_matches_bruteforce_oracle():
    rng = np.random.default_rng(5)
    u = fourier_matrix(8)
    a = subsample(u, random_omega(8, 4, rng))
    assert welch_cost_f1(a) == pytest.approx(f1_oracle(a.matrix), abs=1e-12)


def test_f1_nonnegative_fuzz():
    rng = np.random.default_rng(6)
    u = fourier_matrix(12)
    for _ in range(50):
        a = subsample(u, random_omega(12, int(rng.integers(1, 13)), rng))
        assert welch_cost_f1(a) >= 0.0


# --- reconstruct -----------------------------------------------------------------

def test_reconstruct_zero_mask_equals_subsample():
    kind = UnitaryKind(seqcore.ZC, 8)
    omega = IndexSet(8, (1, 4, 6))
    d = Descriptor(kind, omega, MaskSequence(8, (0, 0, 0)))
    assert np.array_equal(reconstruct(d).matrix,
                          subsample(unitary_matrix(kind), omega, kind).matrix)


def test_reconstruct_round_trip_bit_identical():
    kind = UnitaryKind(seqcore.FOURIER, 16)
    rng = np.random.default_rng(7)
    d = Descriptor(kind, random_omega(16, 6, rng), random_mask(16, 6, rng))
    first = reconstruct(d).matrix
    second = reconstruct(d).matrix
    assert np.array_equal(first, second)


def test_reconstruct_hand_value():
    d = Descriptor(UnitaryKind(seqcore.FOURIER, 8), IndexSet(8, (0, 3, 5)),
                   MaskSequence(8, (0, 2, 4)))
    want = (1 / np.sqrt(3)) * np.exp(2j * np.pi * 2 / 8) * np.exp(-2j * np.pi * 3 * 2 / 8)
    got = reconstruct(d).matrix[1, 2]
    assert got == pytest.approx(want, abs=1e-15)
    assert got == pytest.approx((1 / np.sqrt(3)) * np.exp(-1j * np.pi), abs=1e-12)


# --- invariants -------------------------------------------------------------------

@pytest.mark.parametrize("kind_name,n", [(seqcore.FOURIER, 24), (seqcore.ZC, 24)])
def test_descriptor_built_sets_column_normalized(kind_name, n):
    rng = np.random.default_rng(8)
    kind = UnitaryKind(kind_name, n)
    for _ in range(10):
        m = int(rng.integers(1, n + 1))
        a = subsample(unitary_matrix(kind), random_omega(n, m, rng), kind)
        norms = np.linalg.norm(a.matrix, axis=0)
        assert np.all(np.abs(norms - 1.0) < 1e-10)
        assert np.all(np.abs(np.abs(a.matrix) - 1 / np.sqrt(m)) < 1e-10)
        g = np.abs(gram(a))
        assert np.allclose(np.diag(g), 1.0, atol=1e-10)


def test_mask_invariance_100_random_pairs():
    rng = np.random.default_rng(9)
    n, m = 20, 7
    kind = UnitaryKind(seqcore.FOURIER, n)
    u = unitary_matrix(kind)
    for _ in range(100):
        a = subsample(u, random_omega(n, m, rng), kind)
        masked = apply_mask(a, random_mask(n, m, rng))
        assert np.linalg.norm(gram(masked) - gram(a)) < 1e-10
        assert abs(coherence(masked) - coherence(a)) < 1e-10
        assert abs(welch_cost_f1(masked) - welch_cost_f1(a)) < 1e-10
