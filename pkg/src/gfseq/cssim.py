"""Grant-free access simulator: MMV instance generation, SOMP recovery with
known or unknown sparsity, AER/NMSE metrics, phase transitions, and AUD/CE
Monte Carlo campaigns.

Every trial derives its own RNG stream from (master seed, point index, trial
index), so campaign results are identical at any parallelism level and
re-runs are bit-reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .seqcore import SequenceSet

BERNOULLI = "bernoulli"
FIXED_K = "fixed_k"

EXPECTED_ENERGY = "expected"
REALIZED_ENERGY = "realized"


@dataclass(frozen=True)
class ActivityModel:
    """Device activity: i.i.d. Bernoulli(p_a) or a fixed-size uniform support."""

    mode: str
    p_a: float = 0.0
    k: int = 0

    def __post_init__(self):
        if self.mode == BERNOULLI:
            if not 0.0 <= self.p_a <= 1.0:
                raise ValueError("activity probability must lie in [0, 1]")
        elif self.mode == FIXED_K:
            if self.k < 0:
                raise ValueError("sparsity must be nonnegative")
        else:
            raise ValueError(f"unknown activity mode {self.mode!r}")


def bernoulli(p_a: float) -> ActivityModel:
    return ActivityModel(BERNOULLI, p_a=p_a)


def fixed_k(k: int) -> ActivityModel:
    return ActivityModel(FIXED_K, k=k)


@dataclass(frozen=True)
class MmvInstance:
    """One access trial: Y = S X + W with a row-sparse X."""

    y: np.ndarray
    x_true: np.ndarray
    active: tuple[int, ...]
    sigma2: float
    snr_db: float


@dataclass(frozen=True)
class DetectionReport:
    """SOMP output: detected support, row-sparse estimate, iteration count."""

    detected: tuple[int, ...]
    x_hat: np.ndarray
    iterations: int
    rank_deficient: bool = False


def gen_instance(a: SequenceSet, activity: ActivityModel, j: int, snr_db: float,
                 rng: np.random.Generator,
                 calibration: str = EXPECTED_ENERGY) -> MmvInstance:
    """Draw one MMV instance with CN(0,1) channels and CN(0, sigma2) noise.

    The noise variance is calibrated so the per-device received SNR matches
    `snr_db` in expectation (sigma2 = 1/(M * snr), exact for unit-norm columns
    and unit-variance channels, and well-defined at K = 0). The
    realized-energy calibration instead matches the drawn signal energy; it
    falls back to the expected rule when no device is active.
    """
    if j < 1:
        raise ValueError("need at least one antenna")
    mat = a.matrix
    m, n = mat.shape
    if activity.mode == BERNOULLI:
        active = np.flatnonzero(rng.random(n) < activity.p_a)
    else:
        if activity.k > n:
            raise ValueError("sparsity exceeds the number of devices")
        active = np.sort(rng.choice(n, size=activity.k, replace=False))
    k = active.size
    x = np.zeros((n, j), dtype=np.complex128)
    x[active] = _cn(rng, (k, j), 1.0)
    snr_lin = 10.0 ** (snr_db / 10.0)
    signal = mat @ x
    if calibration == REALIZED_ENERGY and k > 0:
        sigma2 = float(np.sum(np.abs(signal) ** 2)) / (k * j * m * snr_lin)
    elif calibration in (EXPECTED_ENERGY, REALIZED_ENERGY):
        sigma2 = 1.0 / (m * snr_lin)
    else:
        raise ValueError(f"unknown calibration {calibration!r}")
    y = signal + _cn(rng, (m, j), sigma2)
    return MmvInstance(y, x, tuple(int(i) for i in active), sigma2, float(snr_db))


def _cn(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def somp(y: np.ndarray, a: SequenceSet, k: int) -> DetectionReport:
    """Simultaneous OMP with known sparsity: exactly k greedy selections."""
    mat = a.matrix
    if not 1 <= k <= mat.shape[0]:
        raise ValueError("need 1 <= k <= M")
    return _somp_core(np.asarray(y, dtype=np.complex128), mat, max_iter=k)


def somp_blind(y: np.ndarray, a: SequenceSet, sigma2: float,
               j: int | None = None) -> DetectionReport:
    """Sparsity-blind SOMP: iterate while the maximum signal proxy stays at or
    above sqrt(3 * sigma2 * J), selecting at most M atoms."""
    if sigma2 <= 0.0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(y, dtype=np.complex128)
    if j is None:
        j = y.shape[1]
    threshold = np.sqrt(3.0 * sigma2 * j)
    return _somp_core(y, a.matrix, max_iter=a.matrix.shape[0], stop_below=threshold)


def _somp_core(y: np.ndarray, mat: np.ndarray, max_iter: int,
               stop_below: float | None = None) -> DetectionReport:
    m, n = mat.shape
    col_norms = np.linalg.norm(mat, axis=0)
    if np.any(col_norms == 0.0):
        raise ValueError("zero column in the sequence set")
    ah = mat.conj().T
    residual = y.copy()
    # Orthonormal basis of the selected columns, grown one vector per
    # iteration; the residual is updated against it so only one least-squares
    # solve is needed at the end.
    basis = np.empty((m, max_iter), dtype=np.complex128)
    rank = 0
    selected: list[int] = []
    for _ in range(max_iter):
        proxy = np.linalg.norm(ah @ residual, axis=1) / col_norms
        if selected:
            proxy[selected] = -np.inf
        if stop_below is not None and proxy.max() < stop_below:
            break
        idx = int(np.argmax(proxy))
        selected.append(idx)
        v = mat[:, idx].copy()
        for _ in range(2):  # re-orthogonalize once for numerical safety
            if rank:
                v -= basis[:, :rank] @ (basis[:, :rank].conj().T @ v)
        nv = np.linalg.norm(v)
        if nv > 1e-12 * col_norms[idx]:
            basis[:, rank] = v / nv
            residual -= np.outer(basis[:, rank], basis[:, rank].conj() @ residual)
            rank += 1
        # else: the column is already spanned; the residual cannot improve.
    x_hat = np.zeros((n, y.shape[1]), dtype=np.complex128)
    rank_deficient = rank < len(selected)
    if selected:
        coeffs, _, lstsq_rank, _ = np.linalg.lstsq(mat[:, selected], y, rcond=None)
        rank_deficient = rank_deficient or lstsq_rank < len(selected)
        x_hat[selected] = coeffs
    return DetectionReport(tuple(selected), x_hat, len(selected), rank_deficient)


def aer(s_true, s_hat) -> float:
    """Activity error rate |S\\Shat| + |Shat\\S| over |S u Shat|; 0 when both empty."""
    s_true, s_hat = set(s_true), set(s_hat)
    union = len(s_true | s_hat)
    if union == 0:
        return 0.0
    return len(s_true ^ s_hat) / union


def nmse(h_true: np.ndarray, h_hat: np.ndarray) -> float:
    """Normalized squared channel-estimation error over truly active devices."""
    h_true = np.asarray(h_true)
    denom = np.sum(np.abs(h_true) ** 2)
    if denom == 0.0:
        raise ValueError("true channel energy is zero")
    return float(np.sum(np.abs(h_true - np.asarray(h_hat)) ** 2) / denom)


@dataclass(frozen=True)
class PhaseTransitionCurve:
    """Largest K/M with >= `required_rate` empirical success, per M/N point."""

    m_over_n: np.ndarray
    k_over_m: np.ndarray


def phase_transition(builder, n: int, trials: int, snr_db: float, j: int, seed: int,
                     mn_step: float = 2.0 ** -5, km_step: float = 0.01,
                     required_rate: float = 0.99, error_threshold: float = 1e-2,
                     threads: int = 1) -> PhaseTransitionCurve:
    """Sweep compression ratios M/N and sparsity ratios K/M.

    `builder(m)` supplies the M x N sequence set for each grid column. K/M is
    scanned upward and stops at the first ratio whose success rate over
    `trials` SOMP reconstructions (known K, relative Frobenius error^2 below
    `error_threshold`) drops under `required_rate`; K = 0 always succeeds.
    """
    mn_grid = _ratio_grid(mn_step)
    km_grid = _ratio_grid(km_step)
    transitions = np.zeros(mn_grid.size)
    for i_m, ratio in enumerate(mn_grid):
        m = int(round(ratio * n))
        if m < 1:
            continue
        a = builder(m)
        if a.matrix.shape != (m, n):
            raise ValueError(f"builder returned {a.matrix.shape}, expected {(m, n)}")
        transition = 0.0
        prev_k, prev_ok = None, None
        for kappa in km_grid:
            k = int(round(kappa * m))
            if k == 0:
                transition = kappa
                continue
            if k == prev_k:
                ok = prev_ok
            else:
                rate = _success_rate(a, k, trials, snr_db, j, [seed, i_m, k], error_threshold, threads)
                ok = rate >= required_rate
                prev_k, prev_ok = k, ok
            if not ok:
                break
            transition = kappa
        transitions[i_m] = transition
    return PhaseTransitionCurve(mn_grid, transitions)


def _ratio_grid(step: float) -> np.ndarray:
    if not 0.0 < step <= 1.0:
        raise ValueError("grid step must lie in (0, 1]")
    count = int(round(1.0 / step))
    return np.arange(1, count + 1) * step


def _success_rate(a: SequenceSet, k: int, trials: int, snr_db: float, j: int,
                  seed_key: list[int], error_threshold: float, threads: int) -> float:
    activity = fixed_k(k)

    def one(t: int) -> float:
        rng = np.random.default_rng(seed_key + [t])
        inst = gen_instance(a, activity, j, snr_db, rng)
        report = somp(inst.y, a, k)
        err = np.sum(np.abs(inst.x_true - report.x_hat) ** 2)
        ref = np.sum(np.abs(inst.x_true) ** 2)
        return 1.0 if err < error_threshold * ref else 0.0

    results = _map_trials(one, trials, threads)
    return float(np.sum(results)) / trials


@dataclass(frozen=True)
class CampaignPoint:
    """AER/NMSE averages for one operating point."""

    snr_db: float
    antennas: int
    aer: float
    nmse: float
    trials: int
    nmse_trials: int


def aud_ce_point(a: SequenceSet, p_a: float, j: int, snr_db: float, trials: int,
                 seed_key: list[int], threads: int = 1) -> CampaignPoint:
    """Monte Carlo AER/NMSE at one (J, SNR) point with blind SOMP detection.

    AER averages over all trials; NMSE averages over trials with at least one
    active device, crediting undetected devices with a zero estimate.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    activity = bernoulli(p_a)

    def one(t: int) -> tuple[float, float, float]:
        rng = np.random.default_rng(seed_key + [t])
        inst = gen_instance(a, activity, j, snr_db, rng)
        report = somp_blind(inst.y, a, inst.sigma2, j)
        trial_aer = aer(inst.active, report.detected)
        if inst.active:
            rows = list(inst.active)
            trial_nmse = nmse(inst.x_true[rows], report.x_hat[rows])
            return trial_aer, trial_nmse, 1.0
        return trial_aer, 0.0, 0.0

    results = _map_trials(one, trials, threads)
    aer_sum = sum(r[0] for r in results)
    nmse_sum = sum(r[1] for r in results)
    nmse_count = int(sum(r[2] for r in results))
    mean_nmse = nmse_sum / nmse_count if nmse_count else float("nan")
    return CampaignPoint(float(snr_db), j, aer_sum / trials, mean_nmse, trials, nmse_count)


def aud_ce_campaign(a: SequenceSet, p_a: float, j: int, snr_db_list, trials: int,
                    seed: int, threads: int = 1) -> list[CampaignPoint]:
    """AER/NMSE sweep over SNR at a fixed antenna count."""
    return [
        aud_ce_point(a, p_a, j, snr_db, trials, [seed, i], threads)
        for i, snr_db in enumerate(snr_db_list)
    ]


def _map_trials(fn, trials: int, threads: int) -> list:
    if threads == 1:
        return [fn(t) for t in range(trials)]
    workers = threads if threads > 0 else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials)))
