import numpy as np
import pytest

from seqpred.core import (
    EXHAUSTIVE_BINARY_CAP,
    Forecast,
    HorizonTooLargeError,
    PotentialFunction,
    Transcript,
    all_sequences,
    check_stability,
    expected_mistakes,
    mean_phi,
    outcome_values,
    phi_table,
    sequence_index,
    stability_budget,
)
from seqpred.philib import imbalance_phi


def test_all_sequences_shape_and_order():
    Y = all_sequences(3, 2)
    assert Y.shape == (8, 3)
    assert list(Y[0]) == [-1, -1, -1]
    assert list(Y[-1]) == [1, 1, 1]
    # big-endian: the first coordinate changes slowest
    assert (Y[:4, 0] == -1).all() and (Y[4:, 0] == 1).all()


def test_all_sequences_kary_labels():
    Y = all_sequences(2, 3)
    assert Y.shape == (9, 2)
    assert set(np.unique(Y)) == {1, 2, 3}
    assert list(Y[0]) == [1, 1]


def test_sequence_index_roundtrip():
    for k in (2, 3, 4):
        Y = all_sequences(3, k)
        for i, row in enumerate(Y):
            assert sequence_index(row, k) == i


def test_all_sequences_caps():
    with pytest.raises(HorizonTooLargeError):
        all_sequences(EXHAUSTIVE_BINARY_CAP + 1, 2)
    with pytest.raises(HorizonTooLargeError):
        all_sequences(21, 3)


def test_prefix_blocks_are_contiguous():
    n, k = 4, 3
    Y = all_sequences(n, k)
    block = k ** (n - 1)
    for j, v in enumerate(outcome_values(k)):
        assert (Y[j * block:(j + 1) * block, 0] == v).all()


def test_stability_budget():
    assert stability_budget(10, 2) == pytest.approx(0.1)
    assert stability_budget(10, 4) == pytest.approx(1 / 40)


def test_imbalance_is_stable():
    rep = check_stability(imbalance_phi(8))
    assert rep.stable
    assert rep.worst_delta == pytest.approx(1 / 8)


def test_unstable_potential_detected():
    phi = PotentialFunction(4, 2, lambda y: float(y[0]))  # jump of 2 > 1/4
    rep = check_stability(phi)
    assert not rep.stable
    assert rep.max_violation == pytest.approx(2 - 0.25)


def test_sampled_stability_never_exceeds_exhaustive():
    phi = PotentialFunction(5, 2, lambda y: 0.3 * float(np.abs(y).sum() + y.sum()) / 5)
    exh = check_stability(phi)
    samp = check_stability(phi, mode="sampled", m=2000, seed=1)
    assert samp.max_violation <= exh.max_violation + 1e-12


def test_mean_phi_exhaustive_matches_table():
    phi = imbalance_phi(6, 0.0)
    rep = mean_phi(phi)
    assert rep.value == pytest.approx(phi_table(phi).mean(), abs=1e-15)
    assert rep.half_width == 0.0


def test_mean_phi_monte_carlo_reproducible_and_close():
    phi = imbalance_phi(12, 0.5)
    a = mean_phi(phi, mode="monte_carlo", m=20_000, seed=7, workers=4)
    b = mean_phi(phi, mode="monte_carlo", m=20_000, seed=7, workers=4)
    assert a.value == b.value
    exact = mean_phi(phi).value
    assert abs(a.value - exact) <= a.half_width


def test_forecast_validation():
    with pytest.raises(ValueError):
        Forecast(mean=0.5, probs=np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        Forecast.binary(1.5)
    with pytest.raises(ValueError):
        Forecast.categorical([0.7, 0.7])
    f = Forecast.binary(0.2)
    assert f.loss(1) == pytest.approx(0.4)
    assert f.loss(-1) == pytest.approx(0.6)
    g = Forecast.categorical([0.5, 0.3, 0.2])
    assert g.loss(2) == pytest.approx(0.7)


def test_expected_mistakes_constant_forecaster():
    fc = lambda prefix: Forecast.binary(1.0)  # always predicts +1
    assert expected_mistakes(fc, [1, 1, 1, 1]) == 0.0
    assert expected_mistakes(fc, [-1, -1, 1, 1]) == pytest.approx(0.5)


def test_transcript_jsonl_format():
    tr = Transcript(seed=1)
    tr.append(1, Forecast.binary(0.5), 1, -1)
    tr.append(2, Forecast.binary(-1.0), -1, -1)
    lines = tr.to_jsonl({"n": 2}).strip().splitlines()
    assert len(lines) == 3
    import json

    first = json.loads(lines[0])
    assert first == {"t": 1, "q": 0.5, "prediction": 1, "outcome": -1, "cum_mistakes": 1}
    assert json.loads(lines[1])["cum_mistakes"] == 1
    assert tr.cum_mistakes == 1
