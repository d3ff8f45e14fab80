"""Forecasting strategies: exact backward-averaged means, random playouts,
water-filling for k-ary outcomes, and the covariate-aware variant.

Every random operation takes an explicit seed.  The playout stream, the
covariate-hallucination stream and the prediction-draw stream are independent:
each is derived by mixing (seed, round, purpose tag) into a fresh generator.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    EXHAUSTIVE_STATE_CAP,
    Forecast,
    HorizonTooLargeError,
    PotentialFunction,
    StabilityWarning,
    all_sequences,
    outcome_values,
)

_PLAYOUT_TAG = 1
_DRAW_TAG = 2
_XTAIL_TAG = 3
_MASK = (1 << 63) - 1


def derived_rng(seed: int, round_index: int, tag: int) -> np.random.Generator:
    """Deterministic per-(seed, round, purpose) generator."""
    ss = np.random.SeedSequence(entropy=[int(seed) & _MASK, int(round_index), int(tag)])
    return np.random.default_rng(ss)


@dataclass(frozen=True)
class PlayoutConfig:
    """How the expectation over future outcomes is evaluated.

    ``exact_exhaustive`` averages over every future completion,
    ``exact_mc`` over ``m`` sampled completions, ``single_playout`` over one.
    """

    mode: str = "exact_exhaustive"
    m: int = 1
    seed: int = 0
    clamp: bool = True

    _MODES = ("exact_exhaustive", "exact_mc", "single_playout")

    def __post_init__(self):
        if self.mode not in self._MODES:
            raise ValueError(f"mode must be one of {self._MODES}")
        if self.mode == "exact_mc" and self.m < 1:
            raise ValueError("exact_mc requires m >= 1")

    @property
    def playouts(self) -> int:
        return {"exact_exhaustive": 0, "exact_mc": self.m, "single_playout": 1}[self.mode]


def _future_tails(cfg: PlayoutConfig, k: int, rem: int, round_index: int) -> np.ndarray:
    """(m, rem) matrix of future outcome draws (or the full enumeration)."""
    if cfg.mode == "exact_exhaustive":
        if k**rem > EXHAUSTIVE_STATE_CAP:
            raise HorizonTooLargeError(f"{k}^{rem} future completions exceed the cap")
        return all_sequences(rem, k) if rem else np.zeros((1, 0), dtype=int)
    rng = derived_rng(cfg.seed, round_index, _PLAYOUT_TAG)
    m = cfg.playouts
    if k == 2:
        return rng.integers(0, 2, size=(m, rem)) * 2 - 1
    return rng.integers(1, k + 1, size=(m, rem))


def _finish(q_raw: float, clamp: bool) -> Forecast:
    if abs(q_raw) > 1 + 1e-9:
        warnings.warn(
            f"forecast mean {q_raw:.6g} outside [-1, 1]; the potential is not stable",
            StabilityWarning,
            stacklevel=3,
        )
    q = float(np.clip(q_raw, -1.0, 1.0)) if clamp else float(q_raw)
    return Forecast.binary(q)


def _assemble(prefix: np.ndarray, fill: int, tails: np.ndarray) -> np.ndarray:
    m = tails.shape[0]
    pre = np.tile(prefix, (m, 1))
    mid = np.full((m, 1), fill, dtype=int)
    return np.hstack([pre, mid, tails])


def binary_mean(phi: PotentialFunction, prefix, cfg: PlayoutConfig) -> Forecast:
    """Mean forecast n * E[phi(prefix,-1,tail) - phi(prefix,+1,tail)].

    The tail expectation is exhausted, Monte Carlo averaged, or replaced by a
    single playout according to ``cfg``; playout draws are paired across the
    two evaluations.
    """
    if phi.k != 2:
        raise ValueError("binary_mean requires a binary potential")
    prefix = np.asarray(prefix, dtype=int)
    t = len(prefix) + 1
    if t > phi.n:
        raise ValueError("prefix already covers the full horizon")
    tails = _future_tails(cfg, 2, phi.n - t, t)
    lo = phi.batch(_assemble(prefix, -1, tails)).mean()
    hi = phi.batch(_assemble(prefix, +1, tails)).mean()
    return _finish(phi.n * (lo - hi), cfg.clamp)


def waterfill(psi) -> Forecast:
    """The q in the simplex minimizing max_j (psi_j - q_j).

    Solved by locating the water level c with sum_j max(psi_j - c, 0) = 1 via
    sort-and-scan; q_j = max(psi_j - c, 0).
    """
    psi = np.asarray(psi, dtype=float)
    if psi.ndim != 1 or len(psi) < 2:
        raise ValueError("need a vector of length k >= 2")
    if not np.all(np.isfinite(psi)):
        raise ValueError("non-finite entries")
    return Forecast.categorical(waterfill_batch(psi[None, :])[0])


def waterfill_batch(Psi: np.ndarray) -> np.ndarray:
    """Row-wise water-filling; returns a (B, k) matrix of distributions."""
    Psi = np.asarray(Psi, dtype=float)
    k = Psi.shape[1]
    s = -np.sort(-Psi, axis=1)
    csum = np.cumsum(s, axis=1)
    j = np.arange(1, k + 1)
    levels = (csum - 1.0) / j
    active = s - levels > 0
    rho = active.sum(axis=1)            # >= 1 since j=1 always qualifies
    c = levels[np.arange(len(Psi)), rho - 1]
    Q = np.maximum(Psi - c[:, None], 0.0)
    return Q / Q.sum(axis=1, keepdims=True)


def multiclass_forecast(phi: PotentialFunction, prefix, cfg: PlayoutConfig) -> Forecast:
    """Water-filling forecast from the per-label continuation values.

    Computes psi_j = n * E[phi(prefix, j, tail)] with uniform future draws per
    ``cfg`` and returns the distribution minimizing max_j (-q_j - psi'_j),
    i.e. waterfill applied to -psi.
    """
    prefix = np.asarray(prefix, dtype=int)
    t = len(prefix) + 1
    if t > phi.n:
        raise ValueError("prefix already covers the full horizon")
    k = phi.k
    tails = _future_tails(cfg, k, phi.n - t, t)
    psi = np.array([
        phi.batch(_assemble(prefix, j, tails)).mean() for j in outcome_values(k)
    ])
    return waterfill(-phi.n * psi)


@dataclass(frozen=True)
class CovariateSampler:
    """A reproducible source of fresh covariate values.

    Either an i.i.d. ``generator(rng, shape) -> array`` or a finite unlabeled
    ``pool`` sampled with replacement.  Draws are deterministic given
    (seed, round index).
    """

    seed: int
    generator: Callable | None = None
    pool: np.ndarray | None = None
    replace: bool = True

    def __post_init__(self):
        if (self.generator is None) == (self.pool is None):
            raise ValueError("provide exactly one of generator / pool")

    def draw(self, round_index: int, shape) -> np.ndarray:
        rng = derived_rng(self.seed, round_index, _XTAIL_TAG)
        if self.generator is not None:
            return np.asarray(self.generator(rng, shape))
        count = int(np.prod(shape))
        if not self.replace and count > len(self.pool):
            raise ValueError(f"pool of {len(self.pool)} exhausted by a draw of {count}")
        return rng.choice(self.pool, size=shape, replace=self.replace)


def covariate_forecast(
    phi: PotentialFunction,
    x_observed,
    y_prefix,
    sampler: CovariateSampler,
    cfg: PlayoutConfig,
) -> Forecast:
    """Binary forecast with hallucinated future covariates.

    Future covariates come from ``sampler`` and future outcomes from the
    playout stream; the two phi evaluations share every draw.  A potential
    that ignores its covariates reproduces :func:`binary_mean` exactly for the
    same seed.
    """
    if not phi.covariate:
        raise ValueError("potential is not in covariate mode")
    if phi.k != 2:
        raise ValueError("covariate forecasts are binary-only")
    x_observed = np.asarray(x_observed)
    y_prefix = np.asarray(y_prefix, dtype=int)
    t = len(y_prefix) + 1
    if len(x_observed) != t:
        raise ValueError("need covariates x_1..x_t for round t")
    rem = phi.n - t
    tails = _future_tails(cfg, 2, rem, t)
    m = tails.shape[0]
    if cfg.mode == "exact_exhaustive":
        x_tail = np.tile(sampler.draw(t, (rem,)), (m, 1)) if rem else np.zeros((m, 0))
    else:
        x_tail = sampler.draw(t, (m, rem))
    X = np.hstack([np.tile(x_observed, (m, 1)), x_tail])
    lo = phi.batch(_assemble(y_prefix, -1, tails), X).mean()
    hi = phi.batch(_assemble(y_prefix, +1, tails), X).mean()
    return _finish(phi.n * (lo - hi), cfg.clamp)


def draw(forecast: Forecast, seed: int, round_index: int) -> int:
    """Sample a prediction from ``forecast``, deterministic in (seed, round)."""
    rng = derived_rng(seed, round_index, _DRAW_TAG)
    if forecast.is_binary:
        return 1 if rng.random() < (1.0 + forecast.mean) / 2.0 else -1
    k = len(forecast.probs)
    return int(rng.choice(np.arange(1, k + 1), p=forecast.probs))
