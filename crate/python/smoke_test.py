"""Quick check that the extension module imports and behaves sanely."""
import json
import random

import stabilis


def main():
    assert stabilis.auc([0.1, 0.4, 0.35, 0.8], [False, False, True, True]) == 0.75
    assert stabilis.auc([1.0, 1.0], [False, True]) == 0.5

    ts = stabilis.temporal_stability([("a", True, [0.2, 0.4, 0.4]), ("b", False, [0.5, 0.5])])
    assert abs(ts - (1 - (0.1 + 0.0) / 2)) < 1e-12, ts

    assert abs(stabilis.mspd([[0.1, 0.5], [0.3, 0.5]]) - 0.02) < 1e-12
    assert stabilis.smooth([0.0, 1.0, 1.0], 0.5) == [0.0, 0.5, 0.75]
    assert abs(stabilis.overall_auc({1: 0.6, 2: 0.8}, {1: 30, 2: 10}) - 0.65) < 1e-12

    rng = random.Random(0)
    rows = [[rng.random(), rng.random()] for _ in range(400)]
    labels = [x + 0.3 * rng.random() > 0.65 for x, _ in rows]
    for model in (
        stabilis.train_rf(rows, labels, n_estimators=30, seed=1),
        stabilis.train_gbt(rows, labels, n_estimators=40, learning_rate=0.2, seed=1),
    ):
        scores = model.predict(rows)
        assert stabilis.auc(scores, labels) > 0.9
        again = stabilis.Ensemble.from_json(model.to_json())
        assert again.predict(rows) == scores
        assert json.loads(model.to_json())

    platt = stabilis.fit_platt([0.1, 0.2, 0.3, 0.7, 0.8, 0.9], [False, False, True, False, True, True])
    assert platt.is_increasing(), platt
    probs = platt.apply([0.0, 0.5, 1.0])
    assert probs == sorted(probs)

    try:
        stabilis.smooth([0.5], 1.5)
    except ValueError:
        pass
    else:
        raise AssertionError("alpha outside [0, 1] accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()
