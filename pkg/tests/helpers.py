"""Shared test oracles, independent of the library's evaluation paths."""

import itertools
import math

import numpy as np

from maxvar import EmpiricalDistribution, from_samples


def d4() -> EmpiricalDistribution:
    return from_samples([(1, 1), (2, 1), (3, 1), (4, 1)])


def bernoulli_half() -> EmpiricalDistribution:
    return from_samples([(0, 1), (1, 1)])


def brute_force_maxvar(d: EmpiricalDistribution, n: int) -> float:
    """Exhaustive oracle: enumerate all m^n ordered outcome tuples of n
    independent draws and average the max."""
    atoms = list(zip(d.values.tolist(), d.probs.tolist()))
    terms = []
    for combo in itertools.product(atoms, repeat=n):
        prob = math.prod(p for _, p in combo)
        terms.append(max(v for v, _ in combo) * prob)
    return math.fsum(terms)


def brute_force_minvar(d: EmpiricalDistribution, n: int) -> float:
    atoms = list(zip(d.values.tolist(), d.probs.tolist()))
    terms = []
    for combo in itertools.product(atoms, repeat=n):
        prob = math.prod(p for _, p in combo)
        terms.append(min(v for v, _ in combo) * prob)
    return math.fsum(terms)


def brute_force_cvar(d: EmpiricalDistribution, alpha: float) -> float:
    """CVaR by dense scan of the piecewise-linear objective plus exact
    evaluation at the atoms (the kink locations)."""
    lo, hi = float(d.values[0]), float(d.values[-1])
    grid = np.unique(
        np.concatenate([d.values, np.linspace(lo - 1.0, hi + 1.0, 2001)])
    )
    best = math.inf
    for beta in grid:
        tail = math.fsum(np.maximum(d.values - beta, 0.0) * d.probs)
        best = min(best, beta + tail / (1.0 - alpha))
    return best


def random_small_dist(rng: np.random.Generator, max_atoms: int = 6) -> EmpiricalDistribution:
    m = int(rng.integers(1, max_atoms + 1))
    values = rng.uniform(-100.0, 100.0, size=m)
    weights = rng.uniform(0.05, 1.0, size=m)
    return from_samples(np.column_stack([values, weights]))
