"""Core types: potential functions, forecasts, stability and mean checks.

A potential function assigns to every full outcome sequence the expected
mistake rate we are willing to tolerate on it.  A stable potential with the
right uniform mean is realizable by a randomized forecaster; the checks in
this module gate that condition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

# Exhaustive enumeration is desk-scale by design.
EXHAUSTIVE_BINARY_CAP = 20          # max horizon for k=2 full enumeration
EXHAUSTIVE_STATE_CAP = 10**6        # max k**n for k-ary full enumeration


class HorizonTooLargeError(ValueError):
    """Exhaustive mode requested beyond the enumeration caps."""


class StabilityError(ValueError):
    """Operation requires a stable potential but the check failed."""


class AchievabilityError(ValueError):
    """The potential's uniform mean is below the random-guessing floor."""


class StabilityWarning(UserWarning):
    """A forecast mean fell outside [-1, 1] before clamping."""


def outcome_values(k: int) -> np.ndarray:
    """Alphabet as stored internally: {-1,+1} for k=2, labels 1..k otherwise."""
    if k == 2:
        return np.array([-1, 1])
    return np.arange(1, k + 1)


def all_sequences(n: int, k: int = 2) -> np.ndarray:
    """All k**n outcome sequences as a (k**n, n) int array.

    Row order is big-endian in the first coordinate, so every length-t prefix
    owns a contiguous block of k**(n-t) rows.
    """
    if n < 0:
        raise ValueError("negative length")
    total = k**n
    if total > EXHAUSTIVE_STATE_CAP or (k == 2 and n > EXHAUSTIVE_BINARY_CAP):
        raise HorizonTooLargeError(f"k^n = {k}^{n} exceeds the exhaustive cap")
    if n == 0:
        return np.zeros((1, 0), dtype=int)
    idx = np.arange(total)
    place = k ** (n - 1 - np.arange(n))
    digits = (idx[:, None] // place[None, :]) % k
    return outcome_values(k)[digits]


def sequence_index(y: Sequence[int], k: int = 2) -> int:
    """Inverse of the row ordering used by :func:`all_sequences`."""
    y = np.asarray(y)
    digits = (y + 1) // 2 if k == 2 else y - 1
    idx = 0
    for d in digits:
        idx = idx * k + int(d)
    return idx


@dataclass(frozen=True)
class PotentialFunction:
    """A total, pure map from full outcome sequences to reals.

    ``evaluator`` takes a length-n sequence (and, in covariate mode, the full
    covariate sequence as second argument).  ``batch_evaluator``, if given,
    accepts a (B, n) array (plus a (B, n) covariate array in covariate mode)
    and must agree with ``evaluator`` row by row.
    """

    n: int
    k: int
    evaluator: Callable
    covariate: bool = False
    batch_evaluator: Callable | None = None
    name: str = "phi"

    def __post_init__(self):
        if self.n < 1 or self.k < 2:
            raise ValueError("need horizon n >= 1 and alphabet k >= 2")

    def __call__(self, y, x=None) -> float:
        if self.covariate:
            return float(self.evaluator(np.asarray(y), np.asarray(x)))
        return float(self.evaluator(np.asarray(y)))

    def batch(self, Y: np.ndarray, X: np.ndarray | None = None) -> np.ndarray:
        Y = np.asarray(Y)
        if self.batch_evaluator is not None:
            out = self.batch_evaluator(Y, X) if self.covariate else self.batch_evaluator(Y)
            return np.asarray(out, dtype=float)
        if self.covariate:
            return np.array([self.evaluator(row, xr) for row, xr in zip(Y, X)], dtype=float)
        return np.array([self.evaluator(row) for row in Y], dtype=float)


def phi_table(phi: PotentialFunction) -> np.ndarray:
    """phi evaluated on all k**n sequences, in :func:`all_sequences` order."""
    if phi.covariate:
        raise ValueError("covariate-mode potentials have no sequence-only table")
    return phi.batch(all_sequences(phi.n, phi.k))


def stability_budget(n: int, k: int) -> float:
    return 1.0 / n if k == 2 else 1.0 / (n * k)


@dataclass(frozen=True)
class StabilityReport:
    max_violation: float
    checked_mode: str
    budget: float
    worst_delta: float

    @property
    def stable(self) -> bool:
        return self.max_violation == 0.0


def _local_delta(values: np.ndarray, k: int) -> np.ndarray:
    """Per-site stability statistic from the k values along one coordinate."""
    if k == 2:
        return np.abs(values[..., 1] - values[..., 0])
    return values.max(axis=-1) - values.mean(axis=-1)


def check_stability(
    phi: PotentialFunction,
    mode: str = "exhaustive",
    m: int = 10_000,
    seed: int = 0,
) -> StabilityReport:
    """Worst excess of coordinate-flip increments over the stability budget.

    Exhaustive mode covers every coordinate of every sequence; sampled mode
    draws ``m`` random (sequence, coordinate) sites, so its reported violation
    never exceeds the exhaustive one.
    """
    n, k = phi.n, phi.k
    budget = stability_budget(n, k)
    if mode == "exhaustive":
        table = phi_table(phi)
        worst = 0.0
        for t in range(n):
            view = table.reshape(k**t, k, k ** (n - 1 - t))
            worst = max(worst, float(_local_delta(np.moveaxis(view, 1, -1), k).max()))
        # snap float noise on exactly-at-budget increments to zero
        violation = worst - budget if worst - budget > 1e-12 else 0.0
        return StabilityReport(violation, "exhaustive", budget, worst)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    vals = outcome_values(k)
    worst = 0.0
    for _ in range(m):
        y = rng.choice(vals, size=n)
        t = int(rng.integers(n))
        here = np.empty(k)
        for j, v in enumerate(vals):
            y[t] = v
            here[j] = phi(y)
        worst = max(worst, float(_local_delta(here, k)))
    violation = worst - budget if worst - budget > 1e-12 else 0.0
    return StabilityReport(violation, f"sampled(m={m}, seed={seed})", budget, worst)


@dataclass(frozen=True)
class MeanReport:
    value: float
    half_width: float
    mode: str


def mean_phi(
    phi: PotentialFunction,
    mode: str = "exhaustive",
    m: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> MeanReport:
    """Uniform mean of phi: exact by enumeration, or Monte Carlo with a 3-sigma
    half-width.  MC results are bit-reproducible given (seed, workers): the
    sample is partitioned into ``workers`` deterministic chunks and merged by
    weighted averaging.
    """
    if mode == "exhaustive":
        return MeanReport(float(phi_table(phi).mean()), 0.0, "exhaustive")
    if mode != "monte_carlo":
        raise ValueError(f"unknown mode {mode!r}")
    if m < 1:
        raise ValueError("monte_carlo requires m >= 1")
    vals = outcome_values(phi.k)
    children = np.random.SeedSequence(seed).spawn(workers)
    sizes = [m // workers + (1 if i < m % workers else 0) for i in range(workers)]
    total = 0.0
    total_sq = 0.0
    for ss, size in zip(children, sizes):
        if size == 0:
            continue
        rng = np.random.default_rng(ss)
        Y = rng.choice(vals, size=(size, phi.n))
        chunk = phi.batch(Y)
        total += chunk.sum()
        total_sq += (chunk**2).sum()
    mean = total / m
    var = max(0.0, total_sq / m - mean**2)
    half = 3.0 * np.sqrt(var / m)
    return MeanReport(float(mean), float(half), f"monte_carlo(m={m}, seed={seed})")


@dataclass(frozen=True)
class Forecast:
    """A randomized prediction for one round.

    Binary mode stores the mean of a distribution on {-1,+1}; k-ary mode
    stores a probability vector on labels 1..k.
    """

    mean: float | None = None
    probs: np.ndarray | None = None

    def __post_init__(self):
        if (self.mean is None) == (self.probs is None):
            raise ValueError("exactly one of mean / probs must be set")
        if self.mean is not None:
            if not np.isfinite(self.mean) or abs(self.mean) > 1 + 1e-12:
                raise ValueError(f"binary mean {self.mean} outside [-1, 1]")
        else:
            p = np.asarray(self.probs, dtype=float)
            if p.ndim != 1 or len(p) < 2 or np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-12:
                raise ValueError("probs must be a distribution summing to 1")
            object.__setattr__(self, "probs", p)

    @classmethod
    def binary(cls, q: float) -> "Forecast":
        return cls(mean=float(q))

    @classmethod
    def categorical(cls, p) -> "Forecast":
        return cls(probs=np.asarray(p, dtype=float))

    @property
    def is_binary(self) -> bool:
        return self.mean is not None

    def loss(self, outcome: int) -> float:
        """Probability of predicting something other than ``outcome``."""
        if self.is_binary:
            return (1.0 - self.mean * outcome) / 2.0
        return 1.0 - float(self.probs[outcome - 1])


def expected_mistakes(forecaster: Callable, y: Sequence[int], k: int = 2) -> float:
    """Closed-form expected average mistakes of ``forecaster`` on sequence y.

    ``forecaster`` maps a prefix tuple to a :class:`Forecast`; no sampling is
    involved.
    """
    y = np.asarray(y)
    n = len(y)
    total = 0.0
    for t in range(n):
        f = forecaster(tuple(int(v) for v in y[:t]))
        total += f.loss(int(y[t]))
    return total / n


@dataclass
class RoundRecord:
    t: int
    q: object          # float for binary, list of floats for k-ary
    prediction: int
    outcome: int
    mistake: int


@dataclass
class Transcript:
    """Per-round protocol record with a running mistake count."""

    seed: int
    rounds: list[RoundRecord] = field(default_factory=list)

    @property
    def cum_mistakes(self) -> int:
        return sum(r.mistake for r in self.rounds)

    def append(self, t: int, forecast: Forecast, prediction: int, outcome: int) -> RoundRecord:
        q = forecast.mean if forecast.is_binary else [float(p) for p in forecast.probs]
        rec = RoundRecord(t, q, prediction, outcome, int(prediction != outcome))
        self.rounds.append(rec)
        return rec

    def to_jsonl(self, summary: dict | None = None) -> str:
        import json

        lines = []
        cum = 0
        for r in self.rounds:
            cum += r.mistake
            lines.append(json.dumps({
                "t": r.t, "q": r.q, "prediction": r.prediction,
                "outcome": r.outcome, "cum_mistakes": cum,
            }))
        if summary is not None:
            lines.append(json.dumps(summary))
        return "\n".join(lines) + "\n"
