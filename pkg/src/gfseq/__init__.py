"""Non-orthogonal unimodular sequence design by a two-stage genetic algorithm,
with a compressed-sensing grant-free access simulator for evaluating the
resulting sequence sets against random Gaussian, MUSA, and prime-length
Zadoff-Chu baselines."""

__version__ = "0.1.0"

from . import baselines, cssim, ga, papr, seqcore  # noqa: F401
