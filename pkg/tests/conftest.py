import numpy as np
import pytest
from fec import staircase

def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='run long Monte Carlo tests')

def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)

@pytest.fixture
def rng():
    return np.random.default_rng(20240611)

@pytest.fixture(scope='session')
def code256():
    """The (256,239,2) extended BCH code, w = 128."""
    return staircase.build_code(8, t=2)

@pytest.fixture(scope='session')
def code64():
    """The (64,51,2) extended BCH code, w = 32."""
    return staircase.build_code(6, t=2)

@pytest.fixture(scope='session')
def oracle_code():
    """(24,11,2): (64,51,2) shortened by 40, small enough to enumerate."""
    return staircase.build_code(6, t=2, shortening=40)

@pytest.fixture(scope='session')
def oracle_book(oracle_code):
    """Every codeword of :func:`oracle_code`, packed into integers."""
    k = oracle_code.k
    messages = ((np.arange(1 << k)[:, None] >> np.arange(k - 1, -1, -1)) & 1)
    words = staircase.bch_encode(oracle_code, messages.astype(np.uint8))
    return pack_words(words)

_POPCOUNT = np.array([bin(i).count('1') for i in range(1 << 12)], dtype=np.int64)

def pack_words(words) -> np.ndarray:
    words = np.atleast_2d(np.asarray(words, dtype=np.int64))
    weights = 1 << np.arange(words.shape[1] - 1, -1, -1, dtype=np.int64)
    return words @ weights

def popcount(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    return _POPCOUNT[x & 0xFFF] + _POPCOUNT[(x >> 12) & 0xFFF]
