# A separate class to represent the probability measure rho on the index set
# and the seeded random streams that draw from it
import logging

import numpy as np

from .Common import *

logger = logging.getLogger(__name__)


class RandomStream:
    # Counter-based PCG64 stream; (seed, key) fully determines the sequence and
    # streams with different keys are independent by SeedSequence construction
    def __init__(self, seed, key = ()):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ArgumentError('Seed must be a 64-bit nonnegative integer, got ' + str(seed))
        self.seed      = seed                    # 64-bit user seed
        self.key       = tuple(int(k) for k in key)   # spawn key of this stream
        self.generator = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key = self.key)))

    def derive(self, *key):
        return RandomStream(self.seed, self.key + tuple(key))

    def for_run(self, run):
        return self.derive(run)

    def uniform(self, size = None):
        return self.generator.random(size)

    def normal(self, size = None):
        return self.generator.standard_normal(size)

    def __str__(self):  # overide for print function
        return 'RandomStream(seed = ' + str(self.seed) + ', key = ' + str(self.key) + ')'


class DiscreteMeasure:
    def __init__(self, weights):
        weights = np.array(weights, dtype = float, ndmin = 1)
        if weights.ndim != 1 or weights.shape[0] < 1:
            raise ArgumentError('Weights must be a nonempty one-dimensional array')
        if not np.all(np.isfinite(weights)) or not np.all(weights > 0.0):
            raise ArgumentError('All weights must be positive')
        if abs(np.sum(weights) - 1.0) > 1e-12:
            raise ArgumentError('Weights must sum to one, sum = ' + repr(float(np.sum(weights))))

        self.weights = weights                 # rho_i > 0, sum one
        self.n       = weights.shape[0]        # size of the support
        self.prob    = None                    # alias table acceptance probabilities
        self.alias   = None                    # alias table alternatives

        self.build_alias_table()

    @classmethod
    def normalized(cls, weights):
        weights = np.array(weights, dtype = float, ndmin = 1)
        return cls(weights / np.sum(weights))

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    @classmethod
    def geometric(cls, n, ratio):
        if not 0.0 < ratio <= 1.0:
            raise ArgumentError('Geometric ratio must lie in (0, 1], got ' + str(ratio))
        return cls.normalized(ratio ** np.arange(n))

    @classmethod
    def skewed(cls, n, skew):
        # rho_j proportional to (j + 1)^(-skew); skew = 0 is uniform
        if skew < 0.0:
            raise ArgumentError('Skew must be nonnegative, got ' + str(skew))
        return cls.normalized((np.arange(n) + 1.0) ** (-skew))

    def build_alias_table(self):
        # Vose's alias method
        n = self.n
        scaled = self.weights * n
        prob = np.zeros(n)
        alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            prob[s] = scaled[s]
            alias[s] = l
            scaled[l] = scaled[l] + scaled[s] - 1.0
            if scaled[l] < 1.0:
                small.append(l)
            else:
                large.append(l)
        for i in large + small:
            prob[i] = 1.0
        self.prob = prob
        self.alias = alias

    def sample(self, stream):
        u = stream.uniform(2)
        i = min(int(u[0] * self.n), self.n - 1)
        if u[1] < self.prob[i]:
            return i
        return int(self.alias[i])

    def sample_many(self, stream, size):
        u = stream.uniform((size, 2))
        i = np.minimum((u[:, 0] * self.n).astype(int), self.n - 1)
        return np.where(u[:, 1] < self.prob[i], i, self.alias[i])

    def expect(self, f):
        total = None
        for i in range(self.n):
            term = self.weights[i] * np.asarray(f(i), dtype = float)
            total = term if total is None else total + term
        if np.ndim(total) == 0:
            return float(total)
        return total

    def __len__(self):
        return self.n

    def __str__(self):  # overide for print function
        return 'Discrete measure on ' + str(self.n) + ' atoms, weights ' + str(self.weights)


if __name__ == '__main__':
    measure = DiscreteMeasure([0.3, 0.7])
    stream = RandomStream(42)
    draws = measure.sample_many(stream, 100000)
    print(measure, np.mean(draws == 0))
