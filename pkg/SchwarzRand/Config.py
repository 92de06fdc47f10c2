# Run configuration: a JSON-backed dataclass that is validated before
# anything is built and that knows how to build the instance, target and solver settings
import dataclasses
import json
import logging

import numpy as np

from .Common import *
from .HilbertSpace import InnerProductSpace
from .Instance import (Instance, orthonormal_instance, unit_dictionary_instance, random_unit_dictionary,
                       RkhsSpec, rkhs_instance, kernel_image, random_collective_spec, collective_instance)
from .Measure import DiscreteMeasure, RandomStream
from .Solver import NoiseSpec, Problem, variants
from .Spectral import make_hs_element

logger = logging.getLogger(__name__)

weight_presets = ['uniform', 'geometric', 'skewed']
target_kinds = ['hs_element', 'atom', 'vector', 'kernel_image', 'phi', 'zero']
instance_params = dict(orthonormal = ['kind', 'd', 'weights'],
                       unit_dictionary = ['kind', 'd', 'n_atoms', 'atoms', 'gram', 'dictionary_seed', 'weights'],
                       rkhs = ['kind', 'kernel', 'n_nodes', 'nodes', 'width', 'grid', 'jitter', 'weights'],
                       collective = ['kind', 'd', 'n', 'n_atoms', 'dictionary_seed', 'weights'])
target_params = ['kind', 's', 'norm', 'coefficients', 'seed', 'index', 'scale', 'values', 'file', 'g']
solver_params = ['variant', 'beta', 'sigma', 'xi_schedule', 'xi0', 'xi_power', 'injection', 'rhs_mode', 'candidate_pool']
output_params = ['csv', 'json', 'log']


def default_instance():
    return dict(kind = 'orthonormal', d = 16, weights = 'uniform')


def default_target():
    return dict(kind = 'hs_element', s = 0.5, norm = 1.0, seed = 0)


def default_solver():
    return dict(variant = 'random', beta = 1.0, sigma = 0.0, xi_schedule = 'optimal', xi0 = 1.0, rhs_mode = 'direct')


def is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def is_number(value):
    return isinstance(value, (int, float, np.integer, np.floating)) and not isinstance(value, bool)


@dataclasses.dataclass
class RunConfig:
    instance: dict = dataclasses.field(default_factory = default_instance)    # kind + parameters
    target: dict = dataclasses.field(default_factory = default_target)        # how u is built
    solver: dict = dataclasses.field(default_factory = default_solver)        # variant + beta, sigma, xi schedule
    m_max: int = 64
    runs: int = 100
    seed: int = None
    threads: int = None
    enumerate: bool = True                                                    # add the enumeration oracle when affordable
    s: float = None                                                           # smoothness index of the interpolation-rate bound
    outputs: dict = dataclasses.field(default_factory = dict)                 # csv / json / log paths

    @classmethod
    def from_dict(cls, content):
        if not isinstance(content, dict):
            raise ConfigError('Configuration must be a JSON object')
        names = [field.name for field in dataclasses.fields(cls)]
        unknown = sorted(set(content) - set(names))
        if unknown:
            raise ConfigError('Unknown configuration keys: ' + ', '.join(unknown))
        config = cls()
        for name in names:
            if name in content:
                value = content[name]
                if name in ['instance', 'target', 'solver', 'outputs'] and not isinstance(value, dict):
                    raise ConfigError('Section ' + name + ' must be an object')
                if name in ['target', 'solver']:
                    # missing target / solver parameters keep their defaults
                    merged = dict(getattr(config, name))
                    merged.update(value)
                    value = merged
                elif name == 'instance':
                    value = dict(value)
                setattr(config, name, value)
        return config

    @classmethod
    def from_json(cls, path):
        try:
            with open(path, 'r') as f:
                content = json.load(f)
        except OSError as err:
            raise ConfigError('Cannot read configuration ' + str(path) + ': ' + str(err))
        except ValueError as err:
            raise ConfigError('Configuration ' + str(path) + ' is not valid JSON: ' + str(err))
        return cls.from_dict(content)

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self, path = None):
        text = json.dumps(self.to_dict(), indent = 2, sort_keys = True) + '\n'
        if path is not None:
            with open(path, 'w') as f:
                f.write(text)
        return text

    def override(self, **fields):
        # CLI flags: None means not given
        values = {name: value for name, value in fields.items() if value is not None}
        return dataclasses.replace(self, **values)

    def validate(self):
        # ConfigError on the first violation
        self.validate_instance()
        self.validate_target()
        self.validate_solver()
        if not is_int(self.m_max) or self.m_max < 0:
            raise ConfigError('m_max must be a nonnegative integer, got ' + repr(self.m_max))
        if not is_int(self.runs) or self.runs < 1:
            raise ConfigError('runs must be a positive integer, got ' + repr(self.runs))
        if self.seed is not None and (not is_int(self.seed) or not 0 <= self.seed < 2 ** 64):
            raise ConfigError('seed must be a 64-bit nonnegative integer, got ' + repr(self.seed))
        if self.threads is not None and (not is_int(self.threads) or self.threads < 1):
            raise ConfigError('threads must be a positive integer, got ' + repr(self.threads))
        if not isinstance(self.enumerate, bool):
            raise ConfigError('enumerate must be true or false')
        if self.s is not None and (not is_number(self.s) or self.s < 0.0):
            raise ConfigError('s must be a nonnegative number, got ' + repr(self.s))
        if not isinstance(self.outputs, dict):
            raise ConfigError('outputs must be an object')
        for key, value in self.outputs.items():
            if key not in output_params:
                raise ConfigError('Unknown output ' + repr(key) + ', expected one of ' + str(output_params))
            if value is not None and not isinstance(value, str):
                raise ConfigError('Output path ' + key + ' must be a string')
        return self

    def validate_instance(self):
        kind = self.instance.get('kind')
        if kind not in Instance.supported:
            raise ConfigError('instance.kind must be one of ' + str(Instance.supported) + ', got ' + repr(kind))
        unknown = sorted(set(self.instance) - set(instance_params[kind]))
        if unknown:
            raise ConfigError('Unknown parameters for instance ' + kind + ': ' + ', '.join(unknown))
        if kind in ['orthonormal', 'collective'] or (kind == 'unit_dictionary' and 'atoms' not in self.instance):
            d = self.instance.get('d')
            if not is_int(d) or d < 1:
                raise ConfigError('instance.d must be a positive integer, got ' + repr(d))
        if kind in ['unit_dictionary', 'collective'] and 'atoms' not in self.instance:
            n_atoms = self.instance.get('n_atoms')
            if not is_int(n_atoms) or n_atoms < 1:
                raise ConfigError('instance.n_atoms must be a positive integer, got ' + repr(n_atoms))
        if kind == 'collective':
            n = self.instance.get('n')
            if not is_int(n) or not 1 <= n <= self.instance['d']:
                raise ConfigError('instance.n must be an integer in [1, d], got ' + repr(n))
        if kind == 'rkhs':
            if self.instance.get('kernel') not in RkhsSpec.supported:
                raise ConfigError('instance.kernel must be one of ' + str(RkhsSpec.supported))
            if 'nodes' not in self.instance:
                n_nodes = self.instance.get('n_nodes')
                if not is_int(n_nodes) or n_nodes < 1:
                    raise ConfigError('instance.n_nodes must be a positive integer, got ' + repr(n_nodes))
            width = self.instance.get('width', 0.1)
            if not is_number(width) or width <= 0.0:
                raise ConfigError('instance.width must be positive, got ' + repr(width))
        self.validate_weights(self.instance.get('weights', 'uniform'))

    def validate_weights(self, weights):
        if isinstance(weights, str):
            weights = dict(preset = weights)
        if isinstance(weights, list):
            if not weights or not all(is_number(w) and w > 0.0 for w in weights):
                raise ConfigError('Explicit weights must be a nonempty list of positive numbers')
            return
        if not isinstance(weights, dict) or weights.get('preset') not in weight_presets:
            raise ConfigError('instance.weights must be a list or one of ' + str(weight_presets))
        if weights['preset'] == 'geometric':
            ratio = weights.get('ratio')
            if not is_number(ratio) or not 0.0 < ratio <= 1.0:
                raise ConfigError('Geometric weights need ratio in (0, 1], got ' + repr(ratio))
        if weights['preset'] == 'skewed':
            skew = weights.get('skew')
            if not is_number(skew) or skew < 0.0:
                raise ConfigError('Skewed weights need skew >= 0, got ' + repr(skew))

    def validate_target(self):
        kind = self.target.get('kind')
        if kind not in target_kinds:
            raise ConfigError('target.kind must be one of ' + str(target_kinds) + ', got ' + repr(kind))
        unknown = sorted(set(self.target) - set(target_params))
        if unknown:
            raise ConfigError('Unknown target parameters: ' + ', '.join(unknown))
        instance_kind = self.instance['kind']
        if instance_kind == 'collective' and kind not in ['phi', 'zero']:
            raise ConfigError('Collective instances take target kind phi or zero, got ' + repr(kind))
        if kind == 'phi' and instance_kind != 'collective':
            raise ConfigError('target kind phi needs a collective instance')
        if kind == 'kernel_image' and instance_kind != 'rkhs':
            raise ConfigError('target kind kernel_image needs an rkhs instance')
        if kind == 'hs_element':
            s = self.target.get('s', 0.5)
            if not is_number(s) or s < 0.0:
                raise ConfigError('target.s must be a nonnegative number, got ' + repr(s))
        if kind == 'atom' and not is_int(self.target.get('index', 0)):
            raise ConfigError('target.index must be an integer')
        if kind == 'vector' and 'values' not in self.target and 'file' not in self.target:
            raise ConfigError('target kind vector needs values or file')

    def validate_solver(self):
        unknown = sorted(set(self.solver) - set(solver_params))
        if unknown:
            raise ConfigError('Unknown solver parameters: ' + ', '.join(unknown))
        variant = self.solver.get('variant')
        if variant not in variants:
            raise ConfigError('solver.variant must be one of ' + str(variants) + ', got ' + repr(variant))
        beta = self.solver.get('beta', 1.0)
        if not is_number(beta) or not 0.0 < beta <= 1.0:
            raise ConfigError('solver.beta must lie in (0, 1], got ' + repr(beta))
        sigma = self.solver.get('sigma', 0.0)
        if not is_number(sigma) or sigma < 0.0:
            raise ConfigError('solver.sigma must be nonnegative, got ' + repr(sigma))
        if self.solver.get('xi_schedule', 'optimal') not in NoiseSpec.supported:
            raise ConfigError('solver.xi_schedule must be one of ' + str(NoiseSpec.supported))
        xi_power = self.solver.get('xi_power', 1.0)
        if not is_number(xi_power) or not xi_power > 0.0:
            raise ConfigError('solver.xi_power must be positive, got ' + repr(xi_power))
        if self.solver.get('injection', 'iterate') not in NoiseSpec.injections:
            raise ConfigError('solver.injection must be one of ' + str(NoiseSpec.injections))
        if self.solver.get('rhs_mode', 'direct') not in Problem.supported:
            raise ConfigError('solver.rhs_mode must be one of ' + str(Problem.supported))

    def build_measure(self, n):
        weights = self.instance.get('weights', 'uniform')
        if isinstance(weights, str):
            weights = dict(preset = weights)
        if isinstance(weights, list):
            if len(weights) != n:
                raise ConfigError('Expected ' + str(n) + ' weights, got ' + str(len(weights)))
            return DiscreteMeasure.normalized(weights)
        if weights['preset'] == 'geometric':
            return DiscreteMeasure.geometric(n, weights['ratio'])
        if weights['preset'] == 'skewed':
            return DiscreteMeasure.skewed(n, weights['skew'])
        return DiscreteMeasure.uniform(n)

    def build_instance(self):
        params = self.instance
        kind = params['kind']
        if kind == 'orthonormal':
            instance = orthonormal_instance(params['d'], self.build_measure(params['d']))
        elif kind == 'unit_dictionary':
            if 'gram' in params:
                space = InnerProductSpace(params['gram'])
            else:
                space = InnerProductSpace.identity(params['d'] if 'd' in params else len(params['atoms']))
            if 'atoms' in params:
                atoms = np.array(params['atoms'], dtype = float)
            else:
                atoms = random_unit_dictionary(space, params['n_atoms'], RandomStream(params.get('dictionary_seed', 0)))
            instance = unit_dictionary_instance(space, atoms, self.build_measure(atoms.shape[1]))
        elif kind == 'rkhs':
            nodes = params['nodes'] if 'nodes' in params else np.linspace(0.0, 1.0, params['n_nodes'])
            spec = RkhsSpec(params['kernel'], nodes, params.get('width', 0.1), params.get('grid'), params.get('jitter'))
            instance = rkhs_instance(spec, self.build_measure(spec.nodes.shape[0]))
        else:
            space = InnerProductSpace.identity(params['d'])
            spec = random_collective_spec(space, params['n'], params['n_atoms'], RandomStream(params.get('dictionary_seed', 0)))
            instance = collective_instance(spec, self.build_measure(params['n_atoms']))
        logger.info('Built %s', instance)
        return instance

    def build_target(self, instance):
        params = self.target
        kind = params['kind']
        space = instance.space
        if kind == 'zero':
            return space.zeros()
        elif kind == 'phi':
            return instance.default_target
        elif kind == 'hs_element':
            decomp = instance.covariance_decomposition()
            if decomp is None:
                raise ConfigError('target kind hs_element needs a unit-atom instance')
            coefficients = params.get('coefficients')
            stream = None if coefficients is not None else RandomStream(params.get('seed', 0))
            return make_hs_element(decomp, params.get('s', 0.5), coefficients, stream, params.get('norm', 1.0))
        elif kind == 'atom':
            index = params.get('index', 0)
            if instance.atoms is None or not 0 <= index < instance.atoms.shape[1]:
                raise ConfigError('target.index ' + repr(index) + ' is not an atom of the instance')
            return params.get('scale', 1.0) * instance.atoms[:, index]
        elif kind == 'vector':
            values = np.loadtxt(params['file'], ndmin = 1) if 'file' in params else params['values']
            return space.check_vector(np.asarray(values, dtype = float).ravel(), 'target')
        g = params.get('g')
        if g is None:
            g = RandomStream(params.get('seed', 0)).normal(len(instance.measure))
        return kernel_image(instance, g)

    def build_problem(self, instance = None):
        instance = self.build_instance() if instance is None else instance
        problem = instance.make_problem(self.build_target(instance), self.solver.get('rhs_mode', 'direct'))
        return instance, problem

    def build_noise(self):
        return NoiseSpec(self.solver.get('sigma', 0.0), self.solver.get('xi_schedule', 'optimal'),
                         self.solver.get('xi0', 1.0), self.solver.get('xi_power', 1.0),
                         self.solver.get('injection', 'iterate'))

    def smoothness_index(self):
        # s of the interpolation-rate bound: explicit field, else the s of an hs_element target
        if self.s is not None:
            return float(self.s)
        if self.target.get('kind') == 'hs_element':
            return float(self.target.get('s', 0.5))
        return None

    def __str__(self):  # overide for print function
        return 'RunConfig ' + self.to_json()


if __name__ == '__main__':
    config = RunConfig().validate()
    print(config)
    instance, problem = config.build_problem()
    print(problem)
