#!/usr/bin/env python3
"""Weighted-kappa oracle values for the C++ tests, via scikit-learn.

The worked example is the classic 85-film xeromammogram agreement table
(two radiologists, four ordered categories) that appears throughout the
kappa literature. The table is expanded to rating lists on the {1,3,5,7}
scale and scored with sklearn.metrics.cohen_kappa_score, which the C++
implementation must match to 1e-6. Also prints the kappa of two long
independent uniform raters to confirm the near-zero band asserted in the
acceptance suite.
"""

import numpy as np
from sklearn.metrics import cohen_kappa_score

# rows: rater A category 0..3, cols: rater B category 0..3
TABLE = [
    [21, 12, 0, 0],
    [4, 17, 1, 0],
    [3, 9, 15, 2],
    [0, 0, 0, 1],
]

SCALE = [1, 3, 5, 7]


def expand(table):
    a, b = [], []
    for i, row in enumerate(table):
        for j, n in enumerate(row):
            a += [SCALE[i]] * n
            b += [SCALE[j]] * n
    return a, b


def formula_kappa(a, b, weights):
    # Independent transcription of the weighted-kappa definition, to
    # cross-check sklearn before freezing.
    k = len(SCALE)
    idx = {v: i for i, v in enumerate(SCALE)}
    obs = np.zeros((k, k))
    for x, y in zip(a, b):
        obs[idx[x], idx[y]] += 1
    obs /= obs.sum()
    expect = np.outer(obs.sum(axis=1), obs.sum(axis=0))
    w = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            d = abs(i - j) / (k - 1)
            w[i, j] = d * d if weights == "quadratic" else d
    return 1.0 - (w * obs).sum() / (w * expect).sum()


def main():
    a, b = expand(TABLE)
    assert len(a) == 85
    for weights in ("linear", "quadratic"):
        sk = cohen_kappa_score(a, b, weights=weights)
        mine = formula_kappa(a, b, weights)
        assert abs(sk - mine) < 1e-12, (weights, sk, mine)
        print(f"radiology {weights}: {sk:.15f}")

    rng = np.random.default_rng(20260810)
    ra = rng.choice(SCALE, size=10000)
    rb = rng.choice(SCALE, size=10000)
    for weights in ("linear", "quadratic"):
        print(f"independent {weights}: {cohen_kappa_score(ra, rb, weights=weights):.6f}")


if __name__ == "__main__":
    main()
