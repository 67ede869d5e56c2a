"""M-PAM over AWGN with binary reflected Gray labeling, exact LLRs and
reliability marking.

The received signal is ``y = sqrt(rho) * x + z`` with ``z ~ N(0, 1)`` and
unit-average-energy constellation points ``x``; ``rho`` is therefore the
SNR and ``10*log10(rho)`` the reported SNR in dB.
"""
from __future__ import annotations
from typing import Optional, Tuple
from functools import lru_cache
import math
import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

SUPPORTED_ORDERS = (2, 4, 8)
MAX_QUANT_BITS = 16

class ChannelConfig:
    """Modulation and noise settings.

    .. attribute:: order
        :type: int
        :value: 2

        Number of PAM points ``M`` (2, 4 or 8).
    .. attribute:: snr_db
        :type: float
        :value: 0.0

        ``10*log10(rho)``.
    .. attribute:: seed
        :type: Optional[int]
        :value: None

        Seed for :meth:`rng`. Simulations derive their own per-stream
        generators and ignore it.
    """
    order: int = 2
    snr_db: float = 0.0
    seed: Optional[int] = None

    def __init__(self, order: int = 2, snr_db: float = 0.0,
                 seed: Optional[int] = None):
        if order not in SUPPORTED_ORDERS:
            raise ValueError(
                f'Modulation order must be one of {SUPPORTED_ORDERS}, got {order}')
        if not math.isfinite(snr_db):
            raise ValueError(f'SNR must be finite, got {snr_db}')
        self.order = int(order)
        self.snr_db = float(snr_db)
        self.seed = seed

    def __repr__(self):
        return ('ChannelConfig(order={0.order}, snr_db={0.snr_db!r}, '
                'seed={0.seed!r})').format(self)

    @property
    def bits_per_symbol(self) -> int:
        return self.order.bit_length() - 1

    @property
    def rho(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def to_dict(self):
        return {'order': self.order, 'snr_db': self.snr_db, 'seed': self.seed}

    @classmethod
    def from_data(cls, data) -> ChannelConfig:
        if isinstance(data, cls):
            return data
        return cls(**data)

    def clone(self, **changes) -> ChannelConfig:
        data = self.to_dict()
        data.update(changes)
        return type(self)(**data)

@lru_cache(maxsize=None)
def pam_constellation(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Unit-energy PAM points in increasing order and their Gray labels.

    :returns: ``(points, labels)`` where ``labels[i]`` holds the bits
        (most significant first) of ``points[i]``.
    """
    if order not in SUPPORTED_ORDERS:
        raise ValueError(
            f'Modulation order must be one of {SUPPORTED_ORDERS}, got {order}')
    m = order.bit_length() - 1
    i = np.arange(order)
    gray = i ^ (i >> 1)
    labels = ((gray[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
    points = (2.0 * i - order + 1) / math.sqrt((order * order - 1) / 3.0)
    points.setflags(write=False)
    labels.setflags(write=False)
    return points, labels

def map_symbols(bits, config: ChannelConfig) -> np.ndarray:
    """Map groups of ``log2(M)`` bits (most significant first) to
    unit-energy PAM points. Scaling by ``sqrt(rho)`` happens in
    :func:`transmit`.

    :raises ValueError: if the bit count is not a multiple of ``log2(M)``.
    """
    bits = np.asarray(bits, dtype=np.uint8).reshape(-1)
    m = config.bits_per_symbol
    if bits.size % m:
        raise ValueError(
            f'Bit count {bits.size} is not a multiple of {m} bits per symbol')
    points, _ = pam_constellation(config.order)
    weights = 1 << np.arange(m - 1, -1, -1)
    labels = bits.reshape(-1, m) @ weights
    # Gray label -> point index
    index = labels.copy()
    shift = labels >> 1
    while shift.any():
        index ^= shift
        shift >>= 1
    return points[index]

def transmit(symbols, config: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """``y = sqrt(rho) * x + z`` with i.i.d. standard normal ``z``."""
    symbols = np.asarray(symbols, dtype=float)
    return math.sqrt(config.rho) * symbols + rng.standard_normal(symbols.shape)

def compute_llrs(y, config: ChannelConfig) -> np.ndarray:
    """Exact bit LLRs ``log P(b=1|y) - log P(b=0|y)`` under uniform priors.

    :returns: One LLR per bit, in transmission order (``log2(M)`` per
        received sample, most significant first).
    """
    y = np.asarray(y, dtype=float).reshape(-1)
    points, labels = pam_constellation(config.order)
    metrics = -0.5 * (y[:, None] - math.sqrt(config.rho) * points[None, :]) ** 2
    m = config.bits_per_symbol
    llrs = np.empty((y.size, m))
    for k in range(m):
        ones = labels[:, k] == 1
        llrs[:, k] = (logsumexp(metrics[:, ones], axis=1)
                      - logsumexp(metrics[:, ~ones], axis=1))
    return llrs.reshape(-1)

def hard_decisions(llrs) -> np.ndarray:
    """Bit ``1`` iff its LLR is positive; a zero LLR decides ``0``."""
    return (np.asarray(llrs) > 0).astype(np.uint8)

def hd_demap(y, config: ChannelConfig) -> np.ndarray:
    """Hard-decision demapping, consistent bit for bit with the sign of
    :func:`compute_llrs`.

    For ``M > 2`` this is not nearest-point labeling. Bits whose label
    changes between two adjacent points have their decision boundary
    pushed off the midpoint by the farther points. At the midpoint of
    the two lowest 4-PAM points the result is therefore ``01``, not
    ``00``. The gap closes as the SNR grows.
    """
    return hard_decisions(compute_llrs(y, config))

class MarkPlane:
    """Reliability marks of one block, produced once at demapping.

    .. attribute:: hrb
        :type: numpy.ndarray

        Boolean array; ``True`` marks a highly reliable bit
        (``|λ| >= delta``).
    .. attribute:: level
        :type: numpy.ndarray

        Reliability level, monotone in ``|λ|``. Unsigned integers of
        ``quant_bits`` bits, or the exact magnitudes when
        ``quant_bits`` is :const:`None`.
    .. attribute:: delta
        :type: float
    .. attribute:: quant_bits
        :type: Optional[int]
    """
    hrb: np.ndarray
    level: np.ndarray
    delta: float
    quant_bits: Optional[int]

    def __init__(self, hrb, level, delta: float = math.inf,
                 quant_bits: Optional[int] = None):
        hrb = np.array(hrb, dtype=bool)
        level = np.array(level)
        if hrb.shape != level.shape:
            raise ValueError(
                f'HRB flags {hrb.shape} and levels {level.shape} differ in shape')
        hrb.setflags(write=False)
        level.setflags(write=False)
        self.hrb = hrb
        self.level = level
        self.delta = delta
        self.quant_bits = quant_bits

    @classmethod
    def unmarked(cls, shape) -> MarkPlane:
        """No HRBs and all levels equal."""
        return cls(np.zeros(shape, dtype=bool), np.zeros(shape, dtype=np.uint8))

    @property
    def shape(self):
        return self.hrb.shape

    def reshape(self, *shape) -> MarkPlane:
        return type(self)(self.hrb.reshape(*shape), self.level.reshape(*shape),
                          self.delta, self.quant_bits)

    def __repr__(self):
        return ('MarkPlane(shape={0.shape}, hrbs={1}, delta={0.delta!r}, '
                'quant_bits={0.quant_bits!r})').format(self, int(self.hrb.sum()))

    def hub_candidates(self, row: int, count: int) -> np.ndarray:
        """Columns of the ``count`` least reliable non-HRB bits of ``row``,
        least reliable first, ties broken by lower column."""
        candidates = np.flatnonzero(~self.hrb[row])
        order = np.argsort(self.level[row, candidates], kind='stable')
        return candidates[order[:count]]

def mark_bits(llrs, delta: float, q: Optional[int] = 5) -> MarkPlane:
    """Mark bits from their LLRs.

    A bit is an HRB iff ``|λ| >= delta``. Its level is
    ``clamp(floor(|λ| * (2^q - 1) / delta), 0, 2^q - 1)``, or ``|λ|``
    itself when ``q`` is :const:`None`.

    :raises ValueError: if ``delta`` is not positive or ``q`` is out of
        range.
    """
    if not delta > 0:
        raise ValueError(f'HRB threshold must be positive, got {delta}')
    magnitude = np.abs(np.asarray(llrs, dtype=float))
    hrb = magnitude >= delta
    if q is None:
        return MarkPlane(hrb, magnitude, delta, None)
    if not 1 <= q <= MAX_QUANT_BITS:
        raise ValueError(
            f'Quantization bits must be in 1..{MAX_QUANT_BITS}, got {q}')
    top = (1 << q) - 1
    level = np.clip(np.floor(magnitude * top / delta), 0, top)
    return MarkPlane(hrb, level.astype(np.uint16), delta, q)

def uncoded_ber(order: int, snr_db: float) -> float:
    """Bit error rate of uncoded Gray-labeled ``M``-PAM hard decisions.

    Exact for 2-PAM (``Q(sqrt(rho))``); the usual nearest-neighbor
    approximation otherwise.
    """
    points, _ = pam_constellation(order)
    half_gap = (points[1] - points[0]) / 2.0
    q = norm.sf(half_gap * math.sqrt(10.0 ** (snr_db / 10.0)))
    if order == 2:
        return float(q)
    m = order.bit_length() - 1
    return float(2.0 * (order - 1) / order * q / m)
