# A file to store shared constants, exceptions and small helpers
# that every other module imports without importing each other
import logging
import os
import warnings

import numpy as np

logger = logging.getLogger(__name__)

# Tolerances
SYM_TOL         = 1e-12     # relative asymmetry allowed in a Gram matrix
PIVOT_TOL       = 1e-12     # Cholesky pivots relative to the max diagonal entry
RANK_TOL        = 1e-10     # smallest / largest singular value of a local basis
ZERO_TOL        = 1e-14     # zero residual relative to the error norm
OMP_REJECT_TOL  = 1e-12     # Gram-Schmidt rejection relative to the target norm
EIG_DROP_TOL    = 1e-12     # eigenvalues dropped into Ker(L) relative to mu_max
NULL_TOL        = 1e-13     # dictionary-side eigenvalues treated as zero, relative to the largest
RANGE_TOL       = 1e-10     # allowed kernel component relative to the a-norm
RANGE_COND      = 100.0     # range tolerance per unit of eps x condition number
UNIT_TOL        = 1e-10     # allowed deviation of an atom norm from one
COND_WARN_TOL   = 1e-10     # mu_min / mu_max below which a2_norm warns
ENUM_BUDGET     = 10 ** 7   # weighted sequences allowed in exact enumeration
SIGMA_RULE      = 3.0       # bound satisfaction: mean <= bound + 3 stderr

THREADS_ENV     = 'SCHWARZ_RAND_THREADS'


class SchwarzError(Exception):
    pass


class ArgumentError(SchwarzError, ValueError):
    pass


class IndexLookupError(SchwarzError, KeyError):
    pass


class NumericalError(SchwarzError, ArithmeticError):
    pass


class NotInClassError(NumericalError):
    pass


class UnsupportedError(SchwarzError, NotImplementedError):
    pass


class BudgetError(SchwarzError):
    pass


class ConfigError(SchwarzError, ValueError):
    pass


class SchwarzWarning(UserWarning):
    pass


def warn(message):
    warnings.warn(message, SchwarzWarning, stacklevel = 2)


def default_threads():
    value = os.environ.get(THREADS_ENV)
    if value is None or value.strip() == '':
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(THREADS_ENV + ' must be a positive integer, got ' + repr(value))
    if threads < 1:
        raise ConfigError(THREADS_ENV + ' must be a positive integer, got ' + repr(value))
    return threads


def check_folder(folder_name):
    # creates the folder (and missing parents) for an output file
    if folder_name and not os.path.isdir(folder_name):
        os.makedirs(folder_name)


def as_vector(v, dim = None, name = 'vector'):
    v = np.asarray(v, dtype = float)
    if v.ndim != 1:
        raise ArgumentError(name + ' must be one-dimensional, got shape ' + str(v.shape))
    if dim is not None and v.shape[0] != dim:
        raise ArgumentError(name + ' has length ' + str(v.shape[0]) + ', expected ' + str(dim))
    return v
