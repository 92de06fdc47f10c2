import json
import os

import numpy as np
import pytest

from SchwarzRand.Common import ConfigError, default_threads, THREADS_ENV
from SchwarzRand.Config import RunConfig
from SchwarzRand.Spectral import hs_norm

seed = 0


def test_defaults_validate():
    config = RunConfig().validate()
    assert config.instance['kind'] == 'orthonormal'
    assert config.solver['variant'] == 'random'
    assert config.smoothness_index() == 0.5


def test_round_trip(tmp_path):
    config = RunConfig.from_dict(dict(instance = dict(kind = 'unit_dictionary', d = 3, n_atoms = 5,
                                                      weights = dict(preset = 'geometric', ratio = 0.7)),
                                      solver = dict(variant = 'omp'), runs = 20, seed = 4)).validate()
    assert RunConfig.from_dict(config.to_dict()) == config
    path = tmp_path / 'config.json'
    config.to_json(str(path))
    assert RunConfig.from_json(str(path)) == config
    assert json.loads(config.to_json())['solver']['beta'] == 1.0


def test_override():
    config = RunConfig().override(seed = 3, runs = None, m_max = 8)
    assert config.seed == 3
    assert config.runs == 100
    assert config.m_max == 8


@pytest.mark.parametrize("content", [
    dict(runs = 0),
    dict(unknown = 1),
    dict(solver = 'random'),
    dict(solver = dict(variant = 'sideways')),
    dict(solver = dict(beta = 0.0)),
    dict(solver = dict(sigma = -1.0)),
    dict(solver = dict(variant = 'noisy', xi_power = 0.0)),
    dict(solver = dict(variant = 'noisy', injection = 'gradient')),
    dict(instance = dict(kind = 'collective', d = 4, n = 2, n_atoms = 6)),
    dict(target = dict(kind = 'kernel_image')),
    dict(target = dict(kind = 'phi')),
    dict(instance = dict(kind = 'orthonormal', d = 0)),
    dict(instance = dict(kind = 'orthonormal', d = 4, weights = 'triangular')),
    dict(instance = dict(kind = 'orthonormal', d = 4, weights = dict(preset = 'geometric', ratio = 2.0))),
    dict(instance = dict(kind = 'rkhs', kernel = 'gaussian', n_nodes = 8, width = -0.1)),
    dict(outputs = dict(pdf = 'out.pdf')),
    dict(seed = -4),
    dict(enumerate = 'yes'),
])
def test_invalid(content):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(content).validate()


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_json(str(tmp_path / 'missing.json'))
    path = tmp_path / 'broken.json'
    path.write_text('{"runs": ')
    with pytest.raises(ConfigError):
        RunConfig.from_json(str(path))


def test_build_hs_target():
    config = RunConfig.from_dict(dict(instance = dict(kind = 'orthonormal', d = 6, weights = [1, 2, 3, 4, 5, 6]),
                                      target = dict(kind = 'hs_element', s = 0.75, norm = 2.0))).validate()
    instance, problem = config.build_problem()
    assert np.allclose(instance.measure.weights, np.arange(1, 7) / 21.0)
    assert np.isclose(hs_norm(problem.target, 0.75, instance.covariance_decomposition()), 2.0)
    assert config.smoothness_index() == 0.75


@pytest.mark.parametrize("instance,target,dim", [
    (dict(kind = 'unit_dictionary', d = 3, n_atoms = 5, dictionary_seed = 2), dict(kind = 'atom', index = 4), 3),
    (dict(kind = 'unit_dictionary', atoms = [[1.0, 0.0], [0.0, 1.0]]), dict(kind = 'vector', values = [1, 2]), 2),
    (dict(kind = 'rkhs', kernel = 'min_plus_one', n_nodes = 8), dict(kind = 'kernel_image', seed = 1), 8),
    (dict(kind = 'collective', d = 5, n = 2, n_atoms = 7), dict(kind = 'phi'), 10),
    (dict(kind = 'orthonormal', d = 4, weights = dict(preset = 'skewed', skew = 1.0)), dict(kind = 'zero'), 4),
])
def test_build_kinds(instance, target, dim):
    config = RunConfig.from_dict(dict(instance = instance, target = target)).validate()
    built, problem = config.build_problem()
    assert problem.target.shape == (dim,)
    assert len(built.measure) == len(built.family)


def test_random_dictionary_is_reproducible():
    content = dict(instance = dict(kind = 'unit_dictionary', d = 3, n_atoms = 5, dictionary_seed = 9))
    first = RunConfig.from_dict(content).validate().build_instance()
    again = RunConfig.from_dict(content).validate().build_instance()
    assert np.array_equal(first.atoms, again.atoms)


def test_noise():
    config = RunConfig.from_dict(dict(solver = dict(variant = 'noisy', sigma = 0.2, xi_schedule = 'prescribed'))).validate()
    noise = config.build_noise()
    assert noise.sigma == 0.2
    assert noise.xi_schedule == 'prescribed'
    assert noise.injection == 'iterate'
    config = RunConfig.from_dict(dict(solver = dict(variant = 'noisy', sigma = 0.2, xi_schedule = 'prescribed',
                                                    xi0 = 1.5, xi_power = 0.5, injection = 'update'))).validate()
    noise = config.build_noise()
    assert noise.injection == 'update'
    assert np.isclose(noise.prescribed_xi(8), 0.5)


def test_threads_env(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising = False)
    assert default_threads() == 1
    monkeypatch.setenv(THREADS_ENV, '3')
    assert default_threads() == 3
    monkeypatch.setenv(THREADS_ENV, 'many')
    with pytest.raises(ConfigError):
        default_threads()


tutorial_configs = os.path.join(os.path.dirname(__file__), '..', 'tutorials', 'configs')


@pytest.mark.parametrize("name", ['orthonormal', 'unit_dictionary', 'rkhs', 'collective', 'noisy', 'greedy'])
def test_tutorial_configs(name):
    config = RunConfig.from_json(os.path.join(tutorial_configs, name + '.json')).validate()
    instance, problem = config.build_problem()
    assert problem.target_norm > 0.0
