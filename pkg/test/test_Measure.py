import numpy as np
import pytest

from SchwarzRand.Common import ArgumentError
from SchwarzRand.Measure import RandomStream, DiscreteMeasure

seed = 42
ndraws = 1000000


def test_point_mass():
    measure = DiscreteMeasure([1.0])
    stream = RandomStream(seed)
    assert all(measure.sample(stream) == 0 for i in range(100))


@pytest.mark.parametrize("weights", [[0.5, 0.5], [0.3, 0.7], [0.1, 0.2, 0.3, 0.4]])
def test_frequencies(weights):
    measure = DiscreteMeasure(weights)
    draws = measure.sample_many(RandomStream(seed), ndraws)
    freq = np.bincount(draws, minlength = len(weights)) / ndraws
    sd = np.sqrt(np.array(weights) * (1 - np.array(weights)) / ndraws)
    assert np.all(np.abs(freq - weights) <= 5 * sd)


def test_single_draw_frequencies():
    measure = DiscreteMeasure([0.3, 0.7])
    stream = RandomStream(seed)
    draws = np.array([measure.sample(stream) for i in range(10000)])
    assert abs(np.mean(draws == 0) - 0.3) <= 5 * np.sqrt(0.21 / 10000)


@pytest.mark.parametrize("weights", [[0.5, 0.5], [0.05, 0.15, 0.8], [0.25, 0.25, 0.125, 0.375]])
def test_alias_table_reproduces_weights(weights):
    measure = DiscreteMeasure(weights)
    n = len(weights)
    mass = measure.prob / n
    for j in range(n):
        if measure.alias[j] != j:
            mass[measure.alias[j]] += (1.0 - measure.prob[j]) / n
    assert np.allclose(mass, weights, atol = 1e-12)


def test_reproducible_streams():
    measure = DiscreteMeasure.uniform(10)
    first = [measure.sample(RandomStream(seed).for_run(3)) for i in range(5)]
    again = [measure.sample(RandomStream(seed).for_run(3)) for i in range(5)]
    assert first == again
    a = RandomStream(seed).for_run(0).uniform(50)
    b = RandomStream(seed).for_run(1).uniform(50)
    assert not np.array_equal(a, b)


def test_expect():
    measure = DiscreteMeasure([0.5, 0.5])
    assert measure.expect(lambda i: 1.0) == 1.0
    assert np.allclose(measure.expect(lambda i: np.eye(2)[i]), [0.5, 0.5])


@pytest.mark.parametrize("weights", [[0.5, -0.5, 1.0], [0.2, 0.2], [], [0.0, 1.0]])
def test_invalid_weights(weights):
    with pytest.raises(ArgumentError):
        DiscreteMeasure(weights)


def test_presets():
    assert np.allclose(DiscreteMeasure.normalized([1.0, 3.0]).weights, [0.25, 0.75])
    assert np.allclose(DiscreteMeasure.skewed(4, 0.0).weights, 0.25)
    geometric = DiscreteMeasure.geometric(3, 0.5)
    assert np.allclose(geometric.weights, np.array([1.0, 0.5, 0.25]) / 1.75)
    with pytest.raises(ArgumentError):
        DiscreteMeasure.geometric(3, 1.5)


def test_bad_seed():
    with pytest.raises(ArgumentError):
        RandomStream(-1)
