"""Graph machinery for node classification.

Weighted Laplacians, the cut-budget vertex set F_kappa and its box+ellipsoid
relaxation, a Lagrangian-bisection solver for the relaxed distance, and the
spectral upper bound on the relaxed set's Rademacher averages.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import HorizonTooLargeError, PotentialFunction, all_sequences
from .philib import PenaltyConstant

BRUTE_FORCE_CAP = 22
EIG_DIM_CAP = 5000


class EdgeListError(ValueError):
    """Malformed edge-list input, with the offending line number."""


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with edge weights in [-1, 1]; unweighted edges use 1."""

    n: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        norm = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) outside vertex range [0,{self.n})")
            if abs(w) > 1:
                raise ValueError(f"edge weight {w} outside [-1, 1]")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            if w != 0:
                adj[u].append(v)
                adj[v].append(u)
        return adj

    @classmethod
    def from_edge_list(cls, text: str) -> "WeightedGraph":
        """Parse the edge-list format: one "u v [w]" per line, '#' comments,
        blank lines ignored, optional header line "n <count>"."""
        edges = []
        n_declared = None
        max_id = -1
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "n":
                if n_declared is not None or edges:
                    raise EdgeListError(f"line {lineno}: header must come first")
                try:
                    n_declared = int(parts[1])
                except (IndexError, ValueError):
                    raise EdgeListError(f"line {lineno}: bad header {line!r}") from None
                continue
            if len(parts) not in (2, 3):
                raise EdgeListError(f"line {lineno}: expected 'u v [w]', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise EdgeListError(f"line {lineno}: cannot parse {line!r}") from None
            edges.append((u, v, w))
            max_id = max(max_id, u, v)
        n = n_declared if n_declared is not None else max_id + 1
        if n <= 0:
            raise EdgeListError("empty graph")
        try:
            return cls(n, tuple(edges))
        except ValueError as exc:
            raise EdgeListError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "WeightedGraph":
        with open(path, encoding="utf-8") as fh:
            return cls.from_edge_list(fh.read())


def build_laplacian(g: WeightedGraph) -> np.ndarray:
    """L = D - W with D the absolute-degree diagonal D_ii = sum_j |W_ij|."""
    W = np.zeros((g.n, g.n))
    for u, v, w in g.edges:
        W[u, v] = W[v, u] = w
    return np.diag(np.abs(W).sum(axis=1)) - W


def cut_value(L: np.ndarray, y) -> float:
    """y^T L y; equals 4 x (number of cut edges) on unweighted graphs."""
    y = np.asarray(y, dtype=float)
    if y.shape != (L.shape[0],):
        raise ValueError("labeling length must match the vertex count")
    return float(y @ L @ y)


def quad_values(L: np.ndarray, Y: np.ndarray) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    return np.einsum("bi,ij,bj->b", Y, L, Y)


@dataclass(frozen=True)
class RelaxedSet:
    """F'_kappa = {w in [-1,1]^n : w^T L w <= kappa}; contains F_kappa."""

    laplacian: np.ndarray
    kappa: float

    def __post_init__(self):
        L = np.asarray(self.laplacian, dtype=float)
        if L.ndim != 2 or L.shape[0] != L.shape[1]:
            raise ValueError("Laplacian must be square")
        if not np.allclose(L, L.T, atol=1e-12):
            raise ValueError("Laplacian must be symmetric")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        object.__setattr__(self, "laplacian", L)

    @property
    def n(self) -> int:
        return self.laplacian.shape[0]


def _require_psd(L: np.ndarray):
    lo = float(np.linalg.eigvalsh(L)[0])
    scale = max(1.0, float(np.abs(L).max()))
    if lo < -1e-8 * scale:
        raise ValueError(
            f"Laplacian is indefinite (min eigenvalue {lo:.3e}); the relaxed "
            "distance requires a convex constraint set - use the brute-force path"
        )


def _box_qp_sweeps(L, diag, lam, Y, W, R, subtol, max_sweeps):
    """Projected cyclic coordinate ascent on w^T y - lam w^T L w over the box.

    Rows are solved jointly; ``R`` carries L @ w per row and is updated in
    place.  ``lam`` must be positive for every row.
    """
    n = L.shape[0]
    for _ in range(max_sweeps):
        delta = 0.0
        for i in range(n):
            r = R[:, i] - diag[i] * W[:, i]
            if diag[i] > 0:
                wi = (Y[:, i] - 2.0 * lam * r) / (2.0 * lam * diag[i])
            else:
                # zero row: the gradient is the constant y_i
                wi = np.sign(Y[:, i])
            np.clip(wi, -1.0, 1.0, out=wi)
            d = wi - W[:, i]
            amax = float(np.abs(d).max())
            if amax > 0:
                R += d[:, None] * L[i][None, :]
                W[:, i] = wi
                delta = max(delta, amax)
        if delta < subtol:
            return True
    return False


def linear_max_relaxed(rset: RelaxedSet, Y: np.ndarray, tol: float = 1e-6,
                       max_sweeps: int = 10_000, max_bisect: int = 200):
    """max_{w in F'_kappa} w^T y for each row y of Y.

    Lagrangian dual on the quadratic constraint: for fixed multiplier the
    concave box QP is solved by projected coordinate ascent to tol/10, and the
    multiplier is bracketed by doubling then bisected on the constraint
    residual.  Returns (objective, W, converged) with W feasible in the box
    exactly and in the quadratic within tol * max(1, kappa).

    Raises on an indefinite Laplacian (the relaxation is only convex for
    positive-semidefinite L).
    """
    L = rset.laplacian
    kappa = rset.kappa
    _require_psd(L)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    B, n = Y.shape
    if n != rset.n:
        raise ValueError("dimension mismatch")
    diag = np.diag(L).copy()
    slack = tol * max(1.0, kappa)
    subtol = tol / 10.0

    W = Y.copy()
    np.clip(W, -1.0, 1.0, out=W)        # lambda = 0 solution for sign vectors
    quad = quad_values(L, W)
    converged = np.ones(B, dtype=bool)
    need = quad > kappa + 1e-15
    if need.any():
        idx = np.flatnonzero(need)
        Ya = Y[idx]
        Wa = Ya.copy()
        np.clip(Wa, -1.0, 1.0, out=Wa)
        Ra = Wa @ L
        lam_lo = np.zeros(len(idx))
        lam_hi = np.full(len(idx), 1.0)
        ok_all = True
        # bracket: double lam_hi until the subproblem solution is feasible
        for _ in range(80):
            ok_all &= _box_qp_sweeps(L, diag, lam_hi, Ya, Wa, Ra, subtol, max_sweeps)
            q = quad_values(L, Wa)
            infeas = q > kappa + 0.5 * slack
            if not infeas.any():
                break
            lam_lo[infeas] = lam_hi[infeas]
            lam_hi[infeas] *= 2.0
        W_best = Wa.copy()
        steps = min(max_bisect, 64)
        for _ in range(steps):
            lam_mid = 0.5 * (lam_lo + lam_hi)
            ok_all &= _box_qp_sweeps(L, diag, lam_mid, Ya, Wa, Ra, subtol, max_sweeps)
            q = quad_values(L, Wa)
            feas = q <= kappa + 0.5 * slack
            lam_hi[feas] = lam_mid[feas]
            W_best[feas] = Wa[feas]
            lam_lo[~feas] = lam_mid[~feas]
        W[idx] = W_best
        quad = quad_values(L, W)
        converged[idx] = ok_all & (quad[idx] <= kappa + slack)
    obj = (W * Y).sum(axis=1)
    return obj, W, converged


@dataclass(frozen=True)
class RelaxedDistanceResult:
    distance: float
    w: np.ndarray
    quad: float
    converged: bool


def relaxed_distance(rset: RelaxedSet, y, tol: float = 1e-6) -> RelaxedDistanceResult:
    """d = 1/2 - (1/2n) max_{w in F'_kappa} w^T y, with the maximizing w.

    The objective is within tol * n of the true optimum; a degraded-tolerance
    solve is flagged via ``converged`` rather than raised.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    y = np.asarray(y, dtype=float)
    obj, W, conv = linear_max_relaxed(rset, y[None, :], tol)
    n = rset.n
    return RelaxedDistanceResult(
        distance=float(0.5 - obj[0] / (2 * n)),
        w=W[0],
        quad=float(quad_values(rset.laplacian, W[:1])[0]),
        converged=bool(conv[0]),
    )


def min_cut_quadratic(L: np.ndarray) -> float:
    """min over {-1,+1}^n of y^T L y by enumeration (n <= 22)."""
    n = L.shape[0]
    if n > BRUTE_FORCE_CAP:
        raise HorizonTooLargeError(f"enumeration capped at n={BRUTE_FORCE_CAP}")
    Y = all_sequences(n, 2)
    return float(quad_values(L, Y).min())


def exact_distance_bruteforce(rset: RelaxedSet, y) -> float:
    """Exact d_H(y, F_kappa) by enumeration; +inf when F_kappa is empty."""
    n = rset.n
    if n > BRUTE_FORCE_CAP:
        raise HorizonTooLargeError(f"enumeration capped at n={BRUTE_FORCE_CAP}")
    y = np.asarray(y, dtype=int)
    Y = all_sequences(n, 2)
    member = quad_values(rset.laplacian, Y) <= rset.kappa + 1e-9
    if not member.any():
        return float("inf")
    return float((Y[member] != y).mean(axis=1).min())


def spectral_rad_bound(rset: RelaxedSet) -> float:
    """(1/2n) sqrt(sum_j 1/lambda_j(M)) with M = I/(2n) + L/(2 kappa)."""
    if rset.kappa <= 0:
        raise ValueError("spectral bound requires kappa > 0")
    n = rset.n
    if n > EIG_DIM_CAP:
        raise ValueError(f"dense eigendecomposition capped at n={EIG_DIM_CAP}")
    M = np.eye(n) / (2 * n) + rset.laplacian / (2 * rset.kappa)
    eig = np.linalg.eigvalsh(M)
    if eig[0] <= 0:
        raise ValueError(f"M is not positive definite (eigenvalue {eig[0]:.3e})")
    return float(np.sqrt((1.0 / eig).sum()) / (2 * n))


def rademacher_relaxed(rset: RelaxedSet, mode: str = "exhaustive",
                       m: int = 2000, seed: int = 0, tol: float = 1e-6) -> PenaltyConstant:
    """Rad(F'_kappa) via the relaxed-distance solver on sign directions."""
    n = rset.n
    if mode == "exhaustive":
        E = all_sequences(n, 2)
    elif mode == "mc":
        rng = np.random.default_rng(seed)
        E = rng.integers(0, 2, size=(m, n)) * 2 - 1
    else:
        raise ValueError(f"unknown mode {mode!r}")
    obj, _, _ = linear_max_relaxed(rset, E, tol)
    vals = obj / (2 * n)
    if mode == "exhaustive":
        return PenaltyConstant(max(0.0, float(vals.mean())), "exhaustive")
    half = 3.0 * float(vals.std(ddof=1)) / np.sqrt(m) if m > 1 else np.inf
    return PenaltyConstant(max(0.0, float(vals.mean())), f"mc_estimate(m={m}, seed={seed})", half)


def relaxed_graph_phi(rset: RelaxedSet, penalty: PenaltyConstant,
                      tol: float = 1e-6) -> PotentialFunction:
    """phi'(y) = relaxed distance to F'_kappa plus the penalty; stable by the
    linear-max form of the extended Hamming distance."""
    n = rset.n

    def batch(Y):
        obj, _, _ = linear_max_relaxed(rset, np.asarray(Y, dtype=float), tol)
        return 0.5 - obj / (2 * n) + penalty.value

    return PotentialFunction(n, 2, lambda y: batch(y[None, :])[0], batch_evaluator=batch,
                             name=f"graph_relaxed(kappa={rset.kappa})")
