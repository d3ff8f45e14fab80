"""The matching-pennies bot against scripted human-like opponents.

The machine wins a round when it predicts the opponent's next choice.  Its
target is distance to the family of short periodic patterns plus a small
penalty, so any opponent who falls into a rhythm loses.  Each opponent below
is a closure from the visible history to the next move.
"""
import numpy as np

from seqpred.philib import PenaltyConstant, finite_set_phi, pattern_family
from seqpred.predictors import PlayoutConfig, binary_mean, draw

n = 500
F = pattern_family(n, 4)
phi = finite_set_phi(F, PenaltyConstant(0.0))
cfg = PlayoutConfig("single_playout", seed=5)

rng = np.random.default_rng(42)
opponents = {
    "always +1": lambda hist: 1,
    "alternator": lambda hist: 1 if len(hist) % 2 == 0 else -1,
    "75/25 coin": lambda hist: 1 if rng.random() < 0.75 else -1,
    "win-stay/lose-shift": lambda hist: hist[-1] if hist else 1,
    "fair coin": lambda hist: 1 if rng.random() < 0.5 else -1,
}

print(f"{n} rounds per opponent, pattern family of period <= 4\n")
print(f"{'opponent':<20}{'machine win rate':>18}")
for name, move in opponents.items():
    hist: list[int] = []
    wins = 0
    for t in range(1, n + 1):
        f = binary_mean(phi, hist, cfg)
        pred = draw(f, seed=5, round_index=t)
        y = move(hist)
        wins += pred == y
        hist.append(y)
    print(f"{name:<20}{wins / n:>18.3f}")

print("\nAgainst a fair coin nobody can beat 1/2; anything predictable gets")
print("exploited.  Play it live with `seqpred game` or `seqpred serve`.")
