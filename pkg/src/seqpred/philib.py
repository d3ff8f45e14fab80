"""Constructors for achievable potential functions and Rademacher estimators.

Each constructor returns a :class:`~seqpred.core.PotentialFunction` with a
vectorized batch evaluator, so oracle enumerations and batched playout
simulations stay cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    EXHAUSTIVE_BINARY_CAP,
    HorizonTooLargeError,
    PotentialFunction,
    all_sequences,
)


@dataclass(frozen=True)
class FiniteVertexSet:
    """A nonempty set of distinct full sequences in {-1,+1}^n (or k-ary labels)."""

    members: np.ndarray        # (M, n) int array
    n: int
    k: int = 2

    def __post_init__(self):
        members = np.asarray(self.members, dtype=int)
        if members.ndim != 2 or members.shape[0] == 0 or members.shape[1] != self.n:
            raise ValueError("members must be a nonempty (M, n) array")
        if len(np.unique(members, axis=0)) != len(members):
            raise ValueError("duplicate members")
        object.__setattr__(self, "members", members)

    def __len__(self) -> int:
        return len(self.members)

    def hamming(self, Y: np.ndarray) -> np.ndarray:
        """Normalized Hamming distance from each row of Y to the set."""
        Y = np.atleast_2d(np.asarray(Y, dtype=int))
        if self.k == 2:
            # mismatches = (n - <y, w>) / 2 for sign vectors; exact in float64
            inner = Y.astype(float) @ self.members.T.astype(float)
            return (self.n - inner.max(axis=1)) / (2.0 * self.n)
        dis = (Y[:, None, :] != self.members[None, :, :]).mean(axis=2)
        return dis.min(axis=1)


@dataclass(frozen=True)
class PenaltyConstant:
    """Additive penalty making a distance potential achievable, with provenance."""

    value: float
    provenance: str = "analytic"
    half_width: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("penalty must be nonnegative")


def imbalance_phi(n: int, C: float = 0.5) -> PotentialFunction:
    """phi(y) = min{ybar, 1 - ybar} + C / sqrt(n), ybar the fraction of +1's.

    C = 1/2 suffices for a uniform mean >= 1/2: the mean of the min term is
    1/2 - E|sum eps| / (2n) >= 1/2 - 1/(2 sqrt(n)).
    """
    if n < 1 or C < 0:
        raise ValueError("need n >= 1 and C >= 0")
    pad = C / np.sqrt(n)

    def batch(Y):
        ybar = (np.asarray(Y) == 1).mean(axis=1)
        return np.minimum(ybar, 1 - ybar) + pad

    return PotentialFunction(n, 2, lambda y: batch(y[None, :])[0], batch_evaluator=batch,
                             name=f"imbalance(C={C})")


def finite_set_phi(F: FiniteVertexSet, penalty: PenaltyConstant) -> PotentialFunction:
    """phi(y) = d_H(y, F) + penalty; stable by construction."""

    def batch(Y):
        return F.hamming(Y) + penalty.value

    return PotentialFunction(F.n, F.k, lambda y: batch(y[None, :])[0], batch_evaluator=batch,
                             name=f"finite_set(|F|={len(F)})")


def aggregate_penalty(n: int, N: int, c: float = 0.5) -> float:
    """sqrt(c log N / n); c = 1/2 is validated by the enumeration oracle."""
    return float(np.sqrt(c * np.log(N) / n))


def aggregate_phi(phis: Sequence[PotentialFunction], c: float = 0.5) -> PotentialFunction:
    """Best-of-all aggregate: min_j phi_j(y) + sqrt(c log N / n)."""
    if not phis:
        raise ValueError("need at least one potential")
    n, k = phis[0].n, phis[0].k
    if any(p.n != n or p.k != k for p in phis):
        raise ValueError("aggregated potentials must share (n, k)")
    if c <= 0:
        raise ValueError("need c > 0")
    pad = aggregate_penalty(n, len(phis), c)

    def batch(Y):
        return np.min([p.batch(Y) for p in phis], axis=0) + pad

    return PotentialFunction(n, k, lambda y: batch(y[None, :])[0], batch_evaluator=batch,
                             name=f"aggregate(N={len(phis)})")


def set_max_evaluator(F: FiniteVertexSet) -> Callable:
    """eps -> max over members of <eps, w>, vectorized over rows of eps."""
    W = F.members.T

    def ev(E):
        E = np.atleast_2d(np.asarray(E))
        return (E @ W).max(axis=1)

    return ev


def rademacher_exhaustive(max_evaluator: Callable, n: int) -> PenaltyConstant:
    """Exact (1/2n) E max <eps, w> over all 2^n sign vectors; n <= 20."""
    if n > EXHAUSTIVE_BINARY_CAP:
        raise HorizonTooLargeError(f"exhaustive Rademacher capped at n={EXHAUSTIVE_BINARY_CAP}")
    E = all_sequences(n, 2)
    vals = np.asarray(max_evaluator(E), dtype=float)
    return PenaltyConstant(max(0.0, float(vals.mean()) / (2 * n)), "exhaustive")


def rademacher_mc(max_evaluator: Callable, n: int, m: int, seed: int = 0) -> PenaltyConstant:
    """Monte Carlo estimate of (1/2n) E max <eps, w> with a 3-sigma half-width."""
    if m < 1:
        raise ValueError("need m >= 1")
    rng = np.random.default_rng(seed)
    E = rng.integers(0, 2, size=(m, n)) * 2 - 1
    vals = np.asarray(max_evaluator(E), dtype=float) / (2 * n)
    half = 3.0 * float(vals.std(ddof=1)) / np.sqrt(m) if m > 1 else np.inf
    return PenaltyConstant(max(0.0, float(vals.mean())), f"mc_estimate(m={m}, seed={seed})", half)


def rademacher_of_set(F: FiniteVertexSet, mode: str = "exhaustive",
                      m: int = 10_000, seed: int = 0) -> PenaltyConstant:
    ev = set_max_evaluator(F)
    if mode == "exhaustive":
        return rademacher_exhaustive(ev, F.n)
    return rademacher_mc(ev, F.n, m, seed)


def pattern_family(n: int, max_period: int) -> FiniteVertexSet:
    """All length-n sequences obtained by tiling a base block of length <= p.

    Includes the constants (p=1) and, from p=2 on, the two alternations; the
    default expert pool for the mind-reader demo.
    """
    if not 1 <= max_period <= n:
        raise ValueError("need 1 <= max_period <= n")
    rows = []
    for p in range(1, max_period + 1):
        for block in all_sequences(p, 2):
            rows.append(np.tile(block, n // p + 1)[:n])
    members = np.unique(np.array(rows), axis=0)
    return FiniteVertexSet(members, n)


def ball_family(adjacency_lists: Sequence[Sequence[int]], radius: int,
                sign_flip: bool = False) -> FiniteVertexSet:
    """One labeling per vertex: +1 on the hop-distance-<=radius ball, -1 outside.

    ``adjacency_lists[v]`` lists the neighbors of v (nonzero-weight edges
    only); a graph object exposing ``.adjacency()`` is also accepted.
    ``sign_flip`` yields the complement family instead.
    """
    if hasattr(adjacency_lists, "adjacency"):
        adjacency_lists = adjacency_lists.adjacency()
    n = len(adjacency_lists)
    if n == 0:
        raise ValueError("empty graph")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    rows = []
    for center in range(n):
        dist = np.full(n, -1)
        dist[center] = 0
        frontier = [center]
        d = 0
        while frontier and d < radius:
            d += 1
            nxt = []
            for u in frontier:
                for v in adjacency_lists[u]:
                    if dist[v] < 0:
                        dist[v] = d
                        nxt.append(v)
            frontier = nxt
        lab = np.where(dist >= 0, 1, -1)
        rows.append(-lab if sign_flip else lab)
    members = np.unique(np.array(rows), axis=0)
    return FiniteVertexSet(members, n)


def project_class(function_class: Sequence[Callable], x) -> FiniteVertexSet:
    """Deduplicated hypercube projection {(f(x_1),...,f(x_n)) : f in class}."""
    if not function_class:
        raise ValueError("empty function class")
    x = np.asarray(x)
    rows = np.array([np.asarray(f(x), dtype=int) for f in function_class])
    return FiniteVertexSet(np.unique(rows, axis=0), len(x))


def projection_phi(function_class: Sequence[Callable], penalty: PenaltyConstant,
                   n: int | None = None, x=None) -> PotentialFunction:
    """phi(x; y) = d_H(y, class projected onto x) + penalty.

    Each f must map a covariate array elementwise to {-1,+1}.  With ``x``
    given the covariates are frozen and a plain sequence potential is
    returned; otherwise the potential is covariate-mode and re-projects for
    every supplied covariate sequence.
    """
    if not function_class:
        raise ValueError("empty function class")
    if x is not None:
        F = project_class(function_class, x)
        return finite_set_phi(F, penalty)
    if n is None:
        raise ValueError("covariate mode needs the horizon n")

    def batch(Y, X):
        Y = np.atleast_2d(np.asarray(Y, dtype=int))
        X = np.atleast_2d(np.asarray(X))
        dists = np.stack([
            (np.asarray(f(X), dtype=int) != Y).mean(axis=1) for f in function_class
        ])
        return dists.min(axis=0) + penalty.value

    return PotentialFunction(
        n, 2, lambda y, xr: batch(y[None, :], xr[None, :])[0],
        covariate=True, batch_evaluator=batch,
        name=f"projection(|class|={len(function_class)})",
    )


@dataclass(frozen=True)
class DyadicTree:
    """Depth-n complete binary tree of covariate values.

    ``levels[t]`` has 2**t entries: the value shown at round t+1 after the
    sign history encoded big-endian as an index (bit 1 for +1).
    """

    levels: tuple

    def __post_init__(self):
        levels = tuple(np.asarray(lv) for lv in self.levels)
        for t, lv in enumerate(levels):
            if len(lv) != 2**t:
                raise ValueError(f"level {t} must have {2**t} nodes")
        object.__setattr__(self, "levels", levels)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @classmethod
    def constant(cls, n: int, x0) -> "DyadicTree":
        return cls(tuple(np.full(2**t, x0) for t in range(n)))

    def paths(self, E: np.ndarray) -> np.ndarray:
        """Covariate paths z_t(eps_{1:t-1}) for each sign sequence row of E."""
        E = np.atleast_2d(np.asarray(E, dtype=int))
        B, n = E.shape
        if n != self.depth:
            raise ValueError("sign sequences must match the tree depth")
        Z = np.empty((B, n), dtype=self.levels[0].dtype)
        idx = np.zeros(B, dtype=int)
        for t in range(n):
            Z[:, t] = self.levels[t][idx]
            idx = idx * 2 + (E[:, t] == 1)
        return Z


def sequential_rademacher(tree: DyadicTree, function_class: Sequence[Callable],
                          m: int = 0, seed: int = 0) -> PenaltyConstant:
    """Sequential Rademacher complexity of the class on the given tree.

    Exhaustive over all 2^n sign paths when ``m == 0`` (n <= 20), otherwise a
    Monte Carlo estimate over m paths.
    """
    n = tree.depth
    if not function_class:
        raise ValueError("empty function class")
    if m == 0:
        E = all_sequences(n, 2)
    else:
        rng = np.random.default_rng(seed)
        E = rng.integers(0, 2, size=(m, n)) * 2 - 1
    Z = tree.paths(E)
    sums = np.stack([(E * np.asarray(f(Z), dtype=int)).sum(axis=1) for f in function_class])
    vals = sums.max(axis=0) / (2 * n)
    if m == 0:
        return PenaltyConstant(max(0.0, float(vals.mean())), "exhaustive")
    half = 3.0 * float(vals.std(ddof=1)) / np.sqrt(m) if m > 1 else np.inf
    return PenaltyConstant(max(0.0, float(vals.mean())), f"mc_estimate(m={m}, seed={seed})", half)
