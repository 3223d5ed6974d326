"""Two-stage genetic algorithm for sequence design.

Stage 1 evolves subsampling index sets of a unitary matrix against an
equiangular-tight-frame distance (or mutual coherence); stage 2 evolves a
per-row unimodular mask against the top-percentile average PAPR of the
resulting columns. Both stages share the same skeleton: all-pairs crossover,
per-chromosome mutation, and elitist truncation of the intermediate
population (size T(T+3)/2) back to T.

Every random draw of a generation happens in a fixed order (crossover pairs
lexicographically, then mutations in population order), so runs are
reproducible from the seed alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import papr as papr_mod
from . import seqcore
from .seqcore import Descriptor, IndexSet, MaskSequence, SequenceSet, UnitaryKind

WELCH_AVERAGE = "welch_average"
COHERENCE = "coherence"

_COST_VARIANTS = (WELCH_AVERAGE, COHERENCE)


@dataclass(frozen=True)
class GaConfig:
    """Parameters for one GA stage.

    `cost_variant` applies to stage 1 only; `delta` (top-percentile width of
    the PAPR cost) applies to stage 2 only.
    """

    population_size: int = 20
    crossover_rate: float = 0.7
    mutation_count: int = 1
    max_iterations: int = 500
    seed: int = 0
    cost_variant: str = WELCH_AVERAGE
    delta: float = 30.0

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population size must be at least 2")
        if not 0.5 < self.crossover_rate < 1.0:
            raise ValueError("crossover rate must lie in (0.5, 1)")
        if self.mutation_count < 0:
            raise ValueError("mutation count must be nonnegative")
        if self.max_iterations < 0:
            raise ValueError("iteration budget must be nonnegative")
        if self.cost_variant not in _COST_VARIANTS:
            raise ValueError(f"unknown cost variant {self.cost_variant!r}")
        if not 0.0 < self.delta <= 100.0:
            raise ValueError("delta must lie in (0, 100]")


@dataclass(frozen=True)
class DesignResult:
    """Output of the two-stage design: the masked set plus both cost traces."""

    sequence_set: SequenceSet
    stage1_trace: np.ndarray
    stage2_trace: np.ndarray

    @property
    def cost_f1(self) -> float:
        return float(self.stage1_trace[-1])

    @property
    def cost_f2(self) -> float:
        return float(self.stage2_trace[-1])


def stage1_init(n: int, m: int, t: int, rng: np.random.Generator) -> list[IndexSet]:
    """T index sets of M distinct uniform indices from [0, n)."""
    if m > n:
        raise ValueError("cannot select more rows than the dimension")
    return [IndexSet(n, tuple(np.sort(rng.choice(n, size=m, replace=False)))) for _ in range(t)]


def stage1_crossover(fitter: IndexSet, other: IndexSet, beta: float,
                     rng: np.random.Generator) -> IndexSet:
    """Child index set with ceil(beta*M) members drawn from the fitter parent.

    The remaining members come from the other parent excluding duplicates; if
    that parent cannot supply enough distinct indices, the shortfall is filled
    uniformly from the complement of the indices chosen so far.
    """
    if fitter.n != other.n or len(fitter) != len(other):
        raise ValueError("parents must share dimension and cardinality")
    m = len(fitter)
    d1 = math.ceil(beta * m)
    chosen = rng.choice(fitter.as_array(), size=d1, replace=False).tolist()
    chosen_set = set(chosen)
    avail = [i for i in other.indices if i not in chosen_set]
    d2 = m - d1
    take = min(d2, len(avail))
    if take > 0:
        picked = rng.choice(np.asarray(avail, dtype=np.int64), size=take, replace=False)
        chosen.extend(picked.tolist())
        chosen_set.update(picked.tolist())
    shortfall = m - len(chosen)
    if shortfall > 0:
        comp = np.setdiff1d(np.arange(fitter.n, dtype=np.int64),
                            np.asarray(chosen, dtype=np.int64), assume_unique=False)
        fill = rng.choice(comp, size=shortfall, replace=False)
        chosen.extend(fill.tolist())
    return IndexSet(fitter.n, tuple(chosen))


def stage1_mutate(omega: IndexSet, mu: int, rng: np.random.Generator) -> IndexSet:
    """Replace mu randomly chosen members with fresh indices from the complement."""
    m = len(omega)
    if mu > m:
        raise ValueError("cannot mutate more members than the set holds")
    if mu > omega.n - m:
        raise ValueError("not enough unused indices to replace the mutated ones")
    if mu == 0:
        return omega
    current = omega.as_array()
    drop = rng.choice(current, size=mu, replace=False)
    comp = np.setdiff1d(np.arange(omega.n, dtype=np.int64), current, assume_unique=False)
    add = rng.choice(comp, size=mu, replace=False)
    kept = np.setdiff1d(current, drop, assume_unique=True)
    return IndexSet(omega.n, tuple(np.concatenate([kept, add])))


def stage2_init(m: int, q: int, t: int, rng: np.random.Generator) -> list[MaskSequence]:
    """T masks of length M with phases uniform over Z_q."""
    return [MaskSequence(q, tuple(rng.integers(0, q, size=m))) for _ in range(t)]


def stage2_crossover(fitter: MaskSequence, other: MaskSequence, beta: float) -> MaskSequence:
    """Positional splice: first ceil(beta*M) symbols from the fitter parent,
    the rest from the other. Deterministic."""
    if fitter.q != other.q or len(fitter) != len(other):
        raise ValueError("parents must share alphabet and length")
    d1 = math.ceil(beta * len(fitter))
    return MaskSequence(fitter.q, fitter.phases[:d1] + other.phases[d1:])


def stage2_mutate(v: MaskSequence, mu: int, rng: np.random.Generator) -> MaskSequence:
    """Redraw mu randomly chosen positions uniformly from Z_q (repeats allowed)."""
    m = len(v)
    if mu > m:
        raise ValueError("cannot mutate more positions than the mask holds")
    if mu == 0:
        return v
    pos = rng.choice(m, size=mu, replace=False)
    phases = list(v.phases)
    fresh = rng.integers(0, v.q, size=mu)
    for p, a in zip(pos, fresh):
        phases[p] = int(a)
    return MaskSequence(v.q, tuple(phases))


def population_update(chromosomes: list, costs: np.ndarray, t: int) -> tuple[list, np.ndarray]:
    """Keep the T lowest-cost chromosomes, ties broken by list position."""
    if len(chromosomes) < t:
        raise ValueError("intermediate population smaller than the target size")
    costs = np.asarray(costs, dtype=np.float64)
    order = np.argsort(costs, kind="stable")[:t]
    return [chromosomes[i] for i in order], costs[order]


def _pair_order(costs: np.ndarray, i: int, j: int) -> tuple[int, int]:
    # Lower cost is fitter; ties go to the earlier population index.
    return (i, j) if costs[i] <= costs[j] else (j, i)


def _memoized(cost_fn):
    """Cache costs by chromosome value. The cost is a pure function of the
    chromosome, so this changes no result, only repeat-evaluation time (late
    populations are dominated by duplicates)."""
    cache: dict = {}

    def wrapped(chrom):
        c = cache.get(chrom)
        if c is None:
            c = cost_fn(chrom)
            cache[chrom] = c
        return c

    return wrapped


def _evolve(population: list, costs: np.ndarray, cfg: GaConfig,
            crossover, mutate, cost_fn) -> tuple[list, np.ndarray, np.ndarray]:
    """Shared evolution loop; returns final population, costs, and best-cost trace."""
    t = cfg.population_size
    trace = [float(costs.min())]
    for _ in range(cfg.max_iterations):
        children = []
        for i in range(t):
            for j in range(i + 1, t):
                a, b = _pair_order(costs, i, j)
                children.append(crossover(population[a], population[b]))
        mutants = [mutate(p) for p in population]
        intermediate = population + children + mutants
        new_costs = np.concatenate([
            costs,
            np.array([cost_fn(c) for c in children + mutants], dtype=np.float64),
        ])
        population, costs = population_update(intermediate, new_costs, t)
        trace.append(float(costs.min()))
    return population, costs, np.asarray(trace)


def run_stage1(u: np.ndarray, m: int, cfg: GaConfig) -> tuple[IndexSet, np.ndarray]:
    """Optimize a subsampling index set for the N x N unitary `u`.

    Returns the fittest index set after the iteration budget together with the
    per-iteration best-cost trace (length max_iterations + 1, entry 0 being the
    best of the random initial population).
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("expected a square unitary matrix")
    n = u.shape[0]
    if not 1 <= m <= n:
        raise ValueError("need 1 <= M <= N")
    rng = np.random.default_rng(cfg.seed)
    cost_fn = _memoized(_stage1_cost_fn(u, m, cfg.cost_variant))
    population = stage1_init(n, m, cfg.population_size, rng)
    costs = np.array([cost_fn(w) for w in population], dtype=np.float64)
    if m == n:
        # Single possible chromosome: evolution is a no-op and mutation has no
        # replacement indices to draw from.
        trace = np.full(cfg.max_iterations + 1, float(costs.min()))
        return population[0], trace
    population, costs, trace = _evolve(
        population, costs, cfg,
        crossover=lambda a, b: stage1_crossover(a, b, cfg.crossover_rate, rng),
        mutate=lambda w: stage1_mutate(w, cfg.mutation_count, rng),
        cost_fn=cost_fn,
    )
    best = int(np.argmin(costs))
    return population[best], trace


def _stage1_cost_fn(u: np.ndarray, m: int, variant: str):
    inv_sqrt_m = 1.0 / np.sqrt(m)
    if variant == WELCH_AVERAGE:
        return lambda w: seqcore._f1_from_matrix(u[w.as_array()] * inv_sqrt_m)
    return lambda w: seqcore._coherence_from_matrix(u[w.as_array()] * inv_sqrt_m)


def run_stage2(a: SequenceSet, cfg: GaConfig,
               papr_cfg: papr_mod.PaprConfig = papr_mod.PaprConfig()) -> tuple[MaskSequence, np.ndarray]:
    """Optimize a per-row mask for the sequence set `a` against the top-delta
    average column PAPR. The mask alphabet size is the number of columns N."""
    mat = a.matrix
    m, n = mat.shape
    q = n
    papr_mod.top_delta_count(n, cfg.delta)  # fail fast on an empty top set
    rng = np.random.default_rng(cfg.seed)
    nfft = papr_cfg.oversampling * m
    energy = np.sum(np.abs(mat) ** 2, axis=0)
    if np.any(energy == 0.0):
        raise ValueError("zero column: PAPR undefined")

    def raw_cost(v: MaskSequence) -> float:
        sig = np.fft.ifft(v.phasors()[:, None] * mat, n=nfft, axis=0)
        paprs = np.max(sig.real**2 + sig.imag**2, axis=0) * nfft**2 / energy
        return papr_mod._cost_f2_from_paprs(paprs, cfg.delta)

    cost_fn = _memoized(raw_cost)
    population = stage2_init(m, q, cfg.population_size, rng)
    costs = np.array([cost_fn(v) for v in population], dtype=np.float64)
    population, costs, trace = _evolve(
        population, costs, cfg,
        crossover=lambda x, y: stage2_crossover(x, y, cfg.crossover_rate),
        mutate=lambda v: stage2_mutate(v, cfg.mutation_count, rng),
        cost_fn=cost_fn,
    )
    best = int(np.argmin(costs))
    return population[best], trace


def run_two_stage(kind: UnitaryKind, m: int, cfg1: GaConfig, cfg2: GaConfig,
                  papr_cfg: papr_mod.PaprConfig = papr_mod.PaprConfig()) -> DesignResult:
    """Stage 1 then stage 2; returns the masked set with its full descriptor."""
    u = seqcore.unitary_matrix(kind)
    omega, trace1 = run_stage1(u, m, cfg1)
    partial = seqcore.subsample(u, omega, kind)
    mask, trace2 = run_stage2(partial, cfg2, papr_cfg)
    return DesignResult(seqcore.apply_mask(partial, mask), trace1, trace2)


def random_search_stage1(u: np.ndarray, m: int, trials: int, cost_variant: str,
                         rng: np.random.Generator) -> tuple[IndexSet, float]:
    """Best of `trials` uniformly drawn index sets under the stage-1 cost.

    The non-evolutionary reference the GA is compared against; ties keep the
    earliest trial.
    """
    u = np.asarray(u, dtype=np.complex128)
    n = u.shape[0]
    if trials < 1:
        raise ValueError("need at least one trial")
    cost_fn = _stage1_cost_fn(u, m, cost_variant)
    best_w, best_c = None, np.inf
    for _ in range(trials):
        w = IndexSet(n, tuple(np.sort(rng.choice(n, size=m, replace=False))))
        c = cost_fn(w)
        if c < best_c:
            best_w, best_c = w, c
    return best_w, float(best_c)
