"""
Shared fixtures: catalog instances, canonical connections, seeded rng
"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from core.construct import canonical_connection, catalog
from core.settings import Settings

POINT_INSTANCES = ('abelian_point', 'so3_product', 'so3_bidiagonal', 'so3_tilted',
                   'drinfeld_double_sl2')
CHART_INSTANCES = ('exact_chart_flat', 'exact_chart_H')

_connections = {}


def connection_for(name: str):
    """Canonical connection of a catalog instance, built once per session"""
    if name not in _connections:
        spec = catalog(name)
        _connections[name] = canonical_connection(spec.algebroid, spec.metric)
    return _connections[name]


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture(scope='session')
def bidiagonal():
    return catalog('so3_bidiagonal')


@pytest.fixture(scope='session')
def exact_h():
    return catalog('exact_chart_H')


@pytest.fixture(scope='session')
def exact_flat():
    return catalog('exact_chart_flat')


@pytest.fixture(scope='session')
def abelian():
    return catalog('abelian_point')
