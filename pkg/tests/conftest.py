# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at http://mozilla.org/MPL/2.0/.
import logging.config

import numpy as np
import pytest

from workmeter import quantum
from workmeter.utils import logging_config


def pytest_addoption(parser):
    '''Add options for selecting the log level and the long running checks.
    '''
    parser.addoption("--loglevel", action="store", dest='loglevel',
                     default='INFO',
                     help="Global log level to use during testing.")
    parser.addoption("--full-scale", action="store_true", dest='fullscale',
                     help="Run the long running figure, trace and study "
                     "checks")


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "full_scale: long running check; needs --full-scale")


def pytest_collection_modifyitems(config, items):
    if config.option.fullscale:
        return
    skip = pytest.mark.skip(
        reason="You must specify `--full-scale` to run long checks")
    for item in items:
        if 'full_scale' in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope='session', autouse=True)
def loglevel(request):
    level = request.config.option.loglevel
    logging.config.dictConfig(logging_config(level))
    return level


@pytest.fixture
def rng():
    """A freshly seeded generator per test.
    """
    return np.random.default_rng(20240611)


@pytest.fixture(params=[2, 3, 4, 5, 6])
def dim(request):
    """System dimensions covered by the random checks.
    """
    return request.param


@pytest.fixture
def mkinstance(rng):
    """A factory of random ``(H_A, H_B, U)`` triples.
    """
    def instance(dim):
        return (
            quantum.random_hermitian(dim, rng),
            quantum.random_hermitian(dim, rng),
            quantum.random_unitary(dim, rng),
        )

    return instance
