"""Desk-scale exhaustive verification of every guarantee.

Everything here works off full tables of the potential over all k**n
sequences, so the exact forecaster, the game-value recursion, and the
per-sequence expected mistake rates are computed in closed form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    Forecast,
    PotentialFunction,
    StabilityError,
    AchievabilityError,
    all_sequences,
    check_stability,
    outcome_values,
    phi_table,
    sequence_index,
)
from .predictors import (
    CovariateSampler,
    PlayoutConfig,
    _DRAW_TAG,
    _PLAYOUT_TAG,
    binary_mean,
    derived_rng,
    waterfill_batch,
)


def prefix_means(table: np.ndarray, n: int, k: int) -> list[np.ndarray]:
    """Conditional means E[phi | prefix] for every prefix, level 0..n.

    Level t has k**t entries indexed like :func:`all_sequences` prefixes.
    """
    means = [None] * (n + 1)
    means[n] = np.asarray(table, dtype=float)
    for t in range(n, 0, -1):
        means[t - 1] = means[t].reshape(-1, k).mean(axis=1)
    return means


class ExactForecaster:
    """The backward-averaged forecaster induced by a potential's full table."""

    def __init__(self, phi: PotentialFunction):
        self.phi = phi
        self.n, self.k = phi.n, phi.k
        self.table = phi_table(phi)
        self.means = prefix_means(self.table, self.n, self.k)

    def q_levels(self) -> list[np.ndarray]:
        """Binary forecast means for every prefix, one array per round."""
        assert self.k == 2
        out = []
        for t in range(self.n):
            ch = self.means[t + 1].reshape(-1, 2)
            out.append(np.clip(self.n * (ch[:, 0] - ch[:, 1]), -1.0, 1.0))
        return out

    def prob_levels(self) -> list[np.ndarray]:
        """k-ary forecast distributions for every prefix, (k^t, k) per round."""
        out = []
        for t in range(self.n):
            psi = -self.n * self.means[t + 1].reshape(-1, self.k)
            out.append(waterfill_batch(psi))
        return out

    def forecast_index(self, level: int, prefix_idx: int) -> Forecast:
        ch = self.means[level + 1][prefix_idx * self.k:(prefix_idx + 1) * self.k]
        if self.k == 2:
            return Forecast.binary(float(np.clip(self.n * (ch[0] - ch[1]), -1, 1)))
        q = waterfill_batch((-self.n * ch)[None, :])[0]
        return Forecast.categorical(q)

    def __call__(self, prefix) -> Forecast:
        return self.forecast_index(len(prefix), sequence_index(prefix, self.k))

    def mu_table(self) -> np.ndarray:
        """Expected average mistakes mu_A(y) for every sequence y."""
        n, k = self.n, self.k
        mu = np.zeros(k**n)
        vals = outcome_values(k)
        for t in range(n):
            if k == 2:
                ch = self.means[t + 1].reshape(-1, 2)
                qv = np.clip(n * (ch[:, 0] - ch[:, 1]), -1.0, 1.0)
                loss = np.stack([(1 - qv * v) / 2 for v in vals], axis=1).reshape(-1)
            else:
                probs = waterfill_batch(-n * self.means[t + 1].reshape(-1, k))
                loss = (1.0 - probs).reshape(-1)
            mu += np.repeat(loss, k ** (n - t - 1))
        return mu / n


def mu_table_for(forecaster: Callable, n: int, k: int = 2) -> np.ndarray:
    """mu_A(y) for all sequences, for an arbitrary prefix->Forecast map."""
    mu = np.zeros(k**n)
    for t in range(n):
        prefixes = all_sequences(t, k)
        loss = np.empty(k**t * k)
        for i, row in enumerate(prefixes):
            f = forecaster(tuple(int(v) for v in row))
            for j, v in enumerate(outcome_values(k)):
                loss[i * k + j] = f.loss(int(v))
        mu += np.repeat(loss, k ** (n - t - 1))
    return mu / n


def average_error_identity(forecaster: Callable, n: int, k: int = 2) -> float:
    """Exhaustive average of mu_A over all k**n sequences; equals 1 - 1/k for
    any forecaster that depends only on the prefix."""
    return float(mu_table_for(forecaster, n, k).mean())


@dataclass(frozen=True)
class AchievabilityReport:
    regime: str                 # "equality" | "inequality"
    mean: float
    max_gap: float              # max |mu - phi| (equality) or max(mu - phi) (inequality)
    tol: float
    ok: bool
    stability_violation: float


def verify_achievability(phi: PotentialFunction, tol: float = 1e-9) -> AchievabilityReport:
    """Run the exact forecaster on every sequence and compare mu_A to phi.

    Mean exactly 1 - 1/k (to 1e-12): equality must hold everywhere; mean
    above: inequality must hold everywhere.  A mean below the floor is the
    impossibility side of the achievability criterion and is raised.
    """
    stab = check_stability(phi)
    if stab.max_violation > 0:
        raise StabilityError(f"potential violates stability by {stab.max_violation:.3g}")
    fc = ExactForecaster(phi)
    mean = float(fc.table.mean())
    target = 1.0 - 1.0 / phi.k
    if mean < target - 1e-12:
        raise AchievabilityError(
            f"uniform mean {mean:.12g} is below {target:.12g}: no forecaster can "
            "match this potential on every sequence"
        )
    mu = fc.mu_table()
    if abs(mean - target) <= 1e-12:
        gap = float(np.abs(mu - fc.table).max())
        return AchievabilityReport("equality", mean, gap, tol, gap <= tol, stab.max_violation)
    gap = float((mu - fc.table).max())
    return AchievabilityReport("inequality", mean, gap, tol, gap <= tol, stab.max_violation)


@dataclass(frozen=True)
class GameValueReport:
    rel0: float
    expected: float             # (1 - 1/k) - E phi
    levels: tuple | None = None

    @property
    def ok(self) -> bool:
        return abs(self.rel0 - self.expected) <= 1e-12


def game_value(phi: PotentialFunction, keep_levels: bool = False) -> GameValueReport:
    """Backward value recursion: leaves -phi, each level the uniform average of
    its children plus (1/n)(1 - 1/k); the root must equal (1 - 1/k) - E phi."""
    n, k = phi.n, phi.k
    table = phi_table(phi)
    step = (1.0 - 1.0 / k) / n
    rel = -table
    levels = [rel.copy()] if keep_levels else None
    for _ in range(n):
        rel = rel.reshape(-1, k).mean(axis=1) + step
        if keep_levels:
            levels.append(rel.copy())
    expected = (1.0 - 1.0 / k) - float(table.mean())
    return GameValueReport(float(rel[0]), expected,
                           tuple(reversed(levels)) if keep_levels else None)


@dataclass(frozen=True)
class AdversaryReport:
    kind: str
    margin_mean: float          # mean of (average mistakes - phi(realized y))
    half_width: float
    runs: int
    mean_mistakes: float
    deterministic: bool


_KINDS = ("oblivious", "adaptive_greedy", "adaptive_optimal")


def _optimal_value_tables(fc: ExactForecaster) -> list[np.ndarray]:
    """Adversary backward induction on (expected mistakes so far - phi)."""
    n, k = fc.n, fc.k
    V = [None] * (n + 1)
    V[n] = -fc.table
    vals = outcome_values(k)
    for t in range(n, 0, -1):
        if k == 2:
            ch = fc.means[t].reshape(-1, 2)
            qv = np.clip(n * (ch[:, 0] - ch[:, 1]), -1.0, 1.0)
            loss = np.stack([(1 - qv * v) / 2 for v in vals], axis=1)
        else:
            loss = 1.0 - waterfill_batch(-n * fc.means[t].reshape(-1, k))
        V[t - 1] = (loss / n + V[t].reshape(-1, k)).max(axis=1)
    return V


def _exact_adversary_run(phi, kind, sequence) -> AdversaryReport:
    fc = ExactForecaster(phi)
    n, k = phi.n, phi.k
    vals = outcome_values(k)
    V = _optimal_value_tables(fc) if kind == "adaptive_optimal" else None
    pidx = 0
    expected_loss = 0.0
    y = []
    for t in range(1, n + 1):
        f = fc.forecast_index(t - 1, pidx)
        losses = np.array([f.loss(int(v)) for v in vals])
        if kind == "oblivious":
            d = int(np.flatnonzero(vals == sequence[t - 1])[0])
        elif kind == "adaptive_greedy":
            d = int(np.argmax(losses))
        else:
            cont = V[t][pidx * k:(pidx + 1) * k]
            d = int(np.argmax(losses / n + cont))
        expected_loss += losses[d]
        y.append(int(vals[d]))
        pidx = pidx * k + d
    margin = expected_loss / n - phi(np.array(y))
    return AdversaryReport(kind, float(margin), 0.0, 1, float(expected_loss / n), True)


def _playout_adversary_run(phi, kind, cfg, runs, seed, sequence) -> AdversaryReport:
    if phi.k != 2:
        raise ValueError("batched playout adversary runs are binary-only")
    n = phi.n
    R = runs
    m = cfg.playouts
    # Adaptive Nature knows the strategy and the history, not the playout
    # coin flips: its decisions use the expected (exact) forecast.
    qlev = V = pidx = None
    if kind in ("adaptive_greedy", "adaptive_optimal"):
        fc = ExactForecaster(phi)
        qlev = fc.q_levels()
        if kind == "adaptive_optimal":
            V = _optimal_value_tables(fc)
        pidx = np.zeros(R, dtype=int)
    Y = np.zeros((R, n), dtype=int)
    mistakes = np.zeros(R)
    for t in range(1, n + 1):
        rem = n - t
        eps = derived_rng(cfg.seed, t, _PLAYOUT_TAG).integers(0, 2, size=(R, m, rem)) * 2 - 1
        prefix = np.repeat(Y[:, :t - 1], m, axis=0)
        tails = eps.reshape(R * m, rem)
        lo = phi.batch(np.hstack([prefix, np.full((R * m, 1), -1), tails]))
        hi = phi.batch(np.hstack([prefix, np.full((R * m, 1), +1), tails]))
        q = np.clip(n * (lo - hi).reshape(R, m).mean(axis=1), -1.0, 1.0)
        if kind == "oblivious":
            yt = np.full(R, int(sequence[t - 1]))
        elif kind == "adaptive_greedy":
            qx = qlev[t - 1][pidx]
            yt = np.where(qx > 0, -1, 1)
            pidx = pidx * 2 + (yt == 1)
        else:
            qx = qlev[t - 1][pidx]
            val_m = (1 + qx) / (2 * n) + V[t][pidx * 2]      # y_t = -1
            val_p = (1 - qx) / (2 * n) + V[t][pidx * 2 + 1]  # y_t = +1
            yt = np.where(val_m > val_p, -1, 1)
            pidx = pidx * 2 + (yt == 1)
        u = derived_rng(seed, t, _DRAW_TAG).random(R)
        pred = np.where(u < (1 + q) / 2, 1, -1)
        mistakes += pred != yt
        Y[:, t - 1] = yt
    margins = mistakes / n - phi.batch(Y)
    half = 3.0 * float(margins.std(ddof=1)) / np.sqrt(R) if R > 1 else np.inf
    return AdversaryReport(kind, float(margins.mean()), half, R,
                           float(mistakes.mean() / n), False)


def adversary_run(
    phi: PotentialFunction,
    kind: str,
    cfg: PlayoutConfig | None = None,
    runs: int = 1000,
    seed: int = 0,
    sequence: Sequence[int] | None = None,
) -> AdversaryReport:
    """Simulate the full protocol against the chosen kind of Nature.

    With an exact predictor the run is deterministic and the margin is the
    closed-form expected mistakes minus phi on the realized sequence; with a
    playout predictor ``runs`` episodes are simulated and the margin carries a
    3-sigma half-width.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    if kind == "oblivious" and sequence is None:
        raise ValueError("oblivious Nature needs a fixed sequence")
    if cfg is None or cfg.mode == "exact_exhaustive":
        return _exact_adversary_run(phi, kind, sequence)
    return _playout_adversary_run(phi, kind, cfg, runs, seed, sequence)


@dataclass(frozen=True)
class PlayoutReport:
    exact_q: float
    playout_mean: float
    half_width: float
    m: int

    @property
    def ok(self) -> bool:
        return abs(self.playout_mean - self.exact_q) <= self.half_width


def playout_equivalence(phi: PotentialFunction, prefix, m: int, seed: int = 0) -> PlayoutReport:
    """Compare the average of m single-playout means against the exact mean."""
    prefix = np.asarray(prefix, dtype=int)
    t = len(prefix) + 1
    rem = phi.n - t
    exact = binary_mean(phi, prefix, PlayoutConfig("exact_exhaustive")).mean
    eps = derived_rng(seed, t, _PLAYOUT_TAG).integers(0, 2, size=(m, rem)) * 2 - 1
    pre = np.tile(prefix, (m, 1))
    lo = phi.batch(np.hstack([pre, np.full((m, 1), -1), eps]))
    hi = phi.batch(np.hstack([pre, np.full((m, 1), +1), eps]))
    qs = phi.n * (lo - hi)
    half = 3.0 * float(qs.std(ddof=1)) / np.sqrt(m) if m > 1 else np.inf
    return PlayoutReport(float(exact), float(qs.mean()), half, m)


@dataclass(frozen=True)
class CovariateReport:
    mean_mistakes: float
    mean_phi: float
    margin: float
    half_width: float
    precheck_value: float
    precheck_half_width: float
    skipped: bool

    @property
    def ok(self) -> bool:
        return not self.skipped and self.margin <= self.half_width


def covariate_bound_check(
    phi: PotentialFunction,
    sampler: CovariateSampler,
    nature: Callable,
    runs: int = 10_000,
    seed: int = 0,
    playouts: int = 1,
    precheck_m: int = 20_000,
) -> CovariateReport:
    """Run the hallucinated-covariate strategy against a scripted semi-adaptive
    Nature and check mistakes <= E phi(x; y) + 3 sigma.

    ``nature(t, x_t, history)`` maps the fresh covariates (per run) and the
    outcome history (runs x (t-1)) to this round's outcomes.  The uniform-mean
    condition E phi(x; eps) >= 1/2 is Monte Carlo checked first; on failure
    the run is skipped and the report flags the impossibility.
    """
    if not phi.covariate or phi.k != 2:
        raise ValueError("needs a binary covariate-mode potential")
    n = phi.n
    rng = np.random.default_rng(seed)
    Xpre = sampler.draw(0, (precheck_m, n))
    Epre = rng.integers(0, 2, size=(precheck_m, n)) * 2 - 1
    vals = phi.batch(Epre, Xpre)
    pre_mean = float(vals.mean())
    pre_half = 3.0 * float(vals.std(ddof=1)) / np.sqrt(precheck_m)
    if pre_mean + pre_half < 0.5:
        return CovariateReport(np.nan, np.nan, np.nan, np.nan, pre_mean, pre_half, True)

    R, P = runs, playouts
    Xobs = sampler.draw(0, (R, n))
    Y = np.zeros((R, n), dtype=int)
    mistakes = np.zeros(R)
    for t in range(1, n + 1):
        rem = n - t
        eps = derived_rng(seed, t, _PLAYOUT_TAG).integers(0, 2, size=(R, P, rem)) * 2 - 1
        xt = sampler.draw(t, (R, P, rem))
        Xfull = np.hstack([np.repeat(Xobs[:, :t], P, axis=0), xt.reshape(R * P, rem)])
        prefix = np.repeat(Y[:, :t - 1], P, axis=0)
        tails = eps.reshape(R * P, rem)
        lo = phi.batch(np.hstack([prefix, np.full((R * P, 1), -1), tails]), Xfull)
        hi = phi.batch(np.hstack([prefix, np.full((R * P, 1), +1), tails]), Xfull)
        q = np.clip(n * (lo - hi).reshape(R, P).mean(axis=1), -1.0, 1.0)
        u = derived_rng(seed, t, _DRAW_TAG).random(R)
        pred = np.where(u < (1 + q) / 2, 1, -1)
        yt = np.asarray(nature(t, Xobs[:, t - 1], Y[:, :t - 1]), dtype=int)
        mistakes += pred != yt
        Y[:, t - 1] = yt
    phis = phi.batch(Y, Xobs)
    margins = mistakes / n - phis
    half = 3.0 * float(margins.std(ddof=1)) / np.sqrt(R) if R > 1 else np.inf
    return CovariateReport(float(mistakes.mean() / n), float(phis.mean()),
                           float(margins.mean()), half, pre_mean, pre_half, False)


def random_forecaster(n: int, seed: int, k: int = 2) -> Callable:
    """A prefix-measurable forecaster with independently random forecasts."""
    rng = np.random.default_rng(seed)
    if k == 2:
        levels = [rng.uniform(-1, 1, size=2**t) for t in range(n)]

        def fc(prefix):
            return Forecast.binary(float(levels[len(prefix)][sequence_index(prefix, 2)]))
    else:
        levels = []
        for t in range(n):
            raw = rng.uniform(0, 1, size=(k**t, k))
            levels.append(raw / raw.sum(axis=1, keepdims=True))

        def fc(prefix):
            return Forecast.categorical(levels[len(prefix)][sequence_index(prefix, k)])

    return fc


def unachievability_witness(phi: PotentialFunction, n_forecasters: int = 100,
                            seed: int = 0) -> bool:
    """For a potential whose mean is below 1 - 1/k, every forecaster in a
    random pool must overshoot phi on at least one sequence."""
    table = phi_table(phi)
    for i in range(n_forecasters):
        mu = mu_table_for(random_forecaster(phi.n, seed + i, phi.k), phi.n, phi.k)
        if not (mu - table > 0).any():
            return False
    return True
