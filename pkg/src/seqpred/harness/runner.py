"""Deterministic transcript replay shared by the CLI and the HTTP service."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from ..core import PotentialFunction, Transcript, outcome_values
from ..predictors import PlayoutConfig, binary_mean, draw, multiclass_forecast
from .specs import ConfigError


def forecast_for(phi: PotentialFunction, prefix, cfg: PlayoutConfig):
    if phi.k == 2:
        return binary_mean(phi, prefix, cfg)
    return multiclass_forecast(phi, prefix, cfg)


def run_transcript(
    phi: PotentialFunction,
    outcomes: Sequence[int],
    cfg: PlayoutConfig,
    seed: int,
) -> Transcript:
    """Replay an outcome stream; byte-identical given (phi, cfg, seed, stream)."""
    if len(outcomes) != phi.n:
        raise ConfigError(f"outcome stream has {len(outcomes)} entries, horizon is {phi.n}")
    valid = set(int(v) for v in outcome_values(phi.k))
    tr = Transcript(seed)
    prefix: list[int] = []
    for t, y in enumerate(outcomes, start=1):
        y = int(y)
        if y not in valid:
            raise ConfigError(f"outcome {y} at round {t} is not in {sorted(valid)}")
        f = forecast_for(phi, prefix, cfg)
        pred = draw(f, seed, t)
        tr.append(t, f, pred, y)
        prefix.append(y)
    return tr


def transcript_summary(phi: PotentialFunction, tr: Transcript) -> dict:
    y = np.array([r.outcome for r in tr.rounds])
    phi_y = float(phi(y))
    mu_hat = tr.cum_mistakes / phi.n
    return {
        "n": phi.n,
        "seed": tr.seed,
        "phi": phi_y,
        "mu_hat": mu_hat,
        "bound_margin": mu_hat - phi_y,
    }


def read_outcomes(path, k: int = 2) -> list[int]:
    """Parse a whitespace/newline-separated outcome stream, '#' comments allowed."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read outcomes: {exc}") from None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        for tok in line.split():
            try:
                out.append(int(tok))
            except ValueError:
                raise ConfigError(f"outcomes line {lineno}: bad token {tok!r}") from None
    return out
