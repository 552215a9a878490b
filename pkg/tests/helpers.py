"""Shared generators and pure-Python oracles for the test suite.

Oracles deliberately avoid the library's own code paths: scores and
correspondences are recomputed with ``math.fsum`` over Python floats,
and the simplex minimum is found by brute-force grid search.
"""

from __future__ import annotations

import math

import numpy as np

from ensdiag import ResidualSet, WeightVector


def random_residual_set(rng, m_range=(2, 8), t_range=(2, 64), scale=10.0):
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    t = int(rng.integers(t_range[0], t_range[1] + 1))
    return ResidualSet(rng.uniform(-scale, scale, size=(m, t)), t)


def random_weights(rng, n_models):
    return WeightVector(rng.dirichlet(np.ones(n_models)))


def score_oracle(z) -> float:
    """Direct-summation mean-squared value of one residual vector."""
    values = [float(v) for v in z]
    return math.fsum(v * v for v in values) / len(values)


def correspondence_oracle(za, zb) -> float:
    """Direct-summation time-averaged product of two residual vectors."""
    a = [float(v) for v in za]
    b = [float(v) for v in zb]
    assert len(a) == len(b)
    return math.fsum(x * y for x, y in zip(a, b)) / len(a)


def weighted_residual_oracle(rows, w):
    """Direct weighted sum of residual rows."""
    t = len(rows[0])
    return [
        math.fsum(float(w[m]) * float(rows[m][i]) for m in range(len(rows)))
        for i in range(t)
    ]


def expansion_oracle(rs: ResidualSet, w) -> float:
    """Ensemble score via the diagonal-plus-cross-terms expansion."""
    z = rs.residuals
    m = rs.n_models
    weights = [float(x) for x in w]
    diag = math.fsum(weights[i] ** 2 * score_oracle(z[i]) for i in range(m))
    cross = math.fsum(
        weights[i] * weights[j] * correspondence_oracle(z[i], z[j])
        for i in range(m)
        for j in range(m)
        if i != j
    )
    return diag + cross


def simplex_grid(n_models: int, step: float) -> np.ndarray:
    """All simplex points with coordinates in multiples of ``step``."""
    n = round(1.0 / step)
    if n_models == 1:
        return np.array([[1.0]])
    if n_models == 2:
        i = np.arange(n + 1)
        return np.column_stack([i / n, (n - i) / n])
    if n_models == 3:
        points = [
            (i / n, j / n, (n - i - j) / n)
            for i in range(n + 1)
            for j in range(n + 1 - i)
        ]
        return np.array(points)
    raise NotImplementedError("grid oracle covers up to three models")


def grid_minimum(gram: np.ndarray, step: float) -> float:
    """Brute-force minimum of ``w @ gram @ w`` over the simplex grid."""
    grid = simplex_grid(gram.shape[0], step)
    values = np.einsum("ij,jk,ik->i", grid, gram, grid)
    return float(values.min())


def dyadic_array(rng, shape, denominator=1024, span=10_000):
    """Random dyadic rationals; sums and differences stay exact in float64."""
    return rng.integers(-span, span + 1, size=shape).astype(np.float64) / denominator
