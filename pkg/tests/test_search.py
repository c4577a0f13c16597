import numpy as np
import pytest

from zcdetect.detect import max_concurrence_search, mixed_concurrence_reduced
from zcdetect.search import (
    ConcurrenceObjective,
    deterministic_start,
    nelder_mead_batch,
    pick_best,
    random_starts,
)
from zcdetect.states import make_zce, random_rank_two
from zcdetect.symmetries import CartanParams, conjugation_from_params


def rosenbrock(x):
    return (1 - x[:, 0]) ** 2 + 100 * (x[:, 1] - x[:, 0] ** 2) ** 2


def test_nelder_mead_quadratic():
    target = np.array([1.0, -2.0, 0.5])
    res = nelder_mead_batch(lambda x: ((x - target) ** 2).sum(axis=1), np.zeros((3, 3)), maxiter=2000, fatol=0)
    assert np.abs(res.x - target).max() < 1e-6


def test_nelder_mead_rosenbrock_batch():
    x0 = np.array([[-1.2, 1.0], [0.0, 0.0], [2.0, 2.0]])
    res = nelder_mead_batch(rosenbrock, x0, maxiter=5000, xatol=1e-10, fatol=0)
    assert np.abs(res.x - 1.0).max() < 1e-6


def test_best_value_never_increases(rng):
    res = nelder_mead_batch(rosenbrock, rng.normal(size=(8, 2)), maxiter=300)
    assert np.all(np.diff(res.best_trace, axis=0) <= 0)
    assert np.array_equal(res.best_trace[-1], res.fun)


def test_objective_matches_reduced(rng):
    s = random_rank_two(rng)
    obj = ConcurrenceObjective(s)
    x = random_starts(rng, 50)
    vals = obj(x)
    for xi, v in zip(x, vals):
        c, _ = mixed_concurrence_reduced(s, conjugation_from_params(CartanParams.from_vector(xi)))
        assert abs(v - c) < 1e-12


def test_objective_trace_part_drops_out(rng):
    s = random_rank_two(rng)
    obj = ConcurrenceObjective(s)
    x = rng.normal(size=(1, 7))
    y = x.copy()
    y[0, [0, 3]] += 0.8
    assert abs(obj(x)[0] - obj(y)[0]) < 1e-12


def test_objective_vanishes_on_zce(rng):
    obj = ConcurrenceObjective(make_zce(0.45, 0.9))
    assert obj(random_starts(rng, 200)).max() < 1e-12


def test_deterministic_start_and_ties():
    assert np.allclose(deterministic_start(), [0, 0, 0, 0, 1, 0, np.pi / 4])
    pts = np.array([[1.0, 0.0], [0.0, 5.0], [0.0, 1.0]])
    assert pick_best(np.array([2.0, 2.0, 2.0]), pts) == 2
    assert pick_best(np.array([1.0, 3.0, 2.0]), pts) == 1


def test_search_is_seeded(rng):
    s = random_rank_two(rng)
    a = max_concurrence_search(s, restarts=6, seed=9)
    b = max_concurrence_search(s, restarts=6, seed=9)
    assert a.value == b.value
    assert np.array_equal(a.params.to_vector(), b.params.to_vector())
    assert a.value > 0.1


def test_search_rejects_zero_restarts(rng):
    with pytest.raises(ValueError):
        max_concurrence_search(random_rank_two(rng), restarts=0)
