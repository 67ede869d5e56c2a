"""Monte Carlo estimation of the post-decoding bit error rate.

Each simulation point runs independent *streams*: encode random
information bits, transmit them, decode them in a sliding window and
compare the delivered blocks with what was sent. Stream ``s`` of SNR
point ``i`` draws all its randomness from
``SeedSequence(seed, spawn_key=(i, s))``, whatever the decoder mode and
whichever process runs it, so modes see the same noise and the counts
do not depend on the number of workers.
"""
from __future__ import annotations
from typing import Optional, List, Iterable, Iterator, NamedTuple, Tuple
from collections import deque
from itertools import count
from warnings import warn
from multiprocessing import Pool
import math
import os
import time
import numpy as np
from scipy.stats import norm
from tqdm import tqdm
from .logger import logger
from .simples import CountingConvention, DecoderMode, StaircaseWarning
from .bch import ComponentCodeSpec
from .frame import Block, StaircaseEncoder, serialize_bits
from .channel import (ChannelConfig, SUPPORTED_ORDERS, map_symbols, transmit,
                      compute_llrs, hard_decisions, mark_bits)
from .window import DecoderConfig, DecodingWindow, decode_window

#: Two-sided 95% normal quantile used by :func:`confidence_interval`.
Z_95 = float(norm.ppf(0.975))

class SimPoint:
    """Counts gathered at one SNR for one decoder mode.

    .. attribute:: snr_db
        :type: float
    .. attribute:: mode
        :type: DecoderMode
    .. attribute:: code
        :type: str

        Component code label, e.g. ``(256,239,2)``.
    .. attribute:: modulation
        :type: int

        PAM order.
    .. attribute:: bits
        :type: int

        Bits counted on delivered blocks after burn-in.
    .. attribute:: bit_errors
        :type: int
    .. attribute:: channel_bit_errors
        :type: int

        Hard-decision errors of the same counted bits before decoding.
    .. attribute:: blocks
        :type: int

        Delivered blocks counted.
    .. attribute:: miscorrections
        :type: int

        Accepted component decodings that did not reproduce the
        transmitted codeword.
    .. attribute:: streams
        :type: int
    .. attribute:: seconds
        :type: float
    .. attribute:: seed
        :type: int
    .. attribute:: snr_index
        :type: int
    """
    snr_db: float
    mode: DecoderMode
    code: str
    modulation: int
    bits: int = 0
    bit_errors: int = 0
    channel_bit_errors: int = 0
    blocks: int = 0
    miscorrections: int = 0
    streams: int = 0
    seconds: float = 0.0
    seed: int = 0
    snr_index: int = 0

    _FIELDS = ('snr_db', 'mode', 'code', 'modulation', 'bits', 'bit_errors',
               'channel_bit_errors', 'blocks', 'miscorrections', 'streams',
               'seconds', 'seed', 'snr_index')

    def __init__(self, snr_db: float, mode, code: str, modulation: int,
                 bits: int = 0, bit_errors: int = 0, channel_bit_errors: int = 0,
                 blocks: int = 0, miscorrections: int = 0, streams: int = 0,
                 seconds: float = 0.0, seed: int = 0, snr_index: int = 0):
        if not 0 <= bit_errors <= bits or not 0 <= channel_bit_errors <= bits:
            raise ValueError(
                f'Error counts ({bit_errors}, {channel_bit_errors}) '
                f'must lie between 0 and {bits}')
        self.snr_db = float(snr_db)
        self.mode = DecoderMode(mode)
        self.code = code
        self.modulation = int(modulation)
        self.bits = int(bits)
        self.bit_errors = int(bit_errors)
        self.channel_bit_errors = int(channel_bit_errors)
        self.blocks = int(blocks)
        self.miscorrections = int(miscorrections)
        self.streams = int(streams)
        self.seconds = float(seconds)
        self.seed = int(seed)
        self.snr_index = int(snr_index)

    def __repr__(self):
        return ('SimPoint(snr_db={0.snr_db!r}, mode={0.mode.value!r}, '
                'code={0.code!r}, bits={0.bits}, bit_errors={0.bit_errors})'
                ).format(self)

    def __eq__(self, other):
        if not isinstance(other, SimPoint):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0

    @property
    def channel_ber(self) -> float:
        return self.channel_bit_errors / self.bits if self.bits else 0.0

    def counts(self) -> Tuple[int, int, int, int, int]:
        """Everything but the timing, for exact comparisons between runs."""
        return (self.bits, self.bit_errors, self.channel_bit_errors,
                self.blocks, self.miscorrections)

    def to_dict(self):
        data = {name: getattr(self, name) for name in self._FIELDS}
        data['mode'] = self.mode.value
        return data

    @classmethod
    def from_data(cls, data) -> SimPoint:
        if isinstance(data, cls):
            return data
        return cls(**{k: data[k] for k in cls._FIELDS if k in data})

def confidence_interval(point: SimPoint, z: float = Z_95) -> Tuple[float, float]:
    """Wilson score interval on the bit error proportion (95% by default).

    :raises ValueError: if no bits were counted.
    """
    n = point.bits
    if n <= 0:
        raise ValueError('No bits counted; the interval is undefined')
    p = point.bit_errors / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)

class SweepConfig:
    """Everything needed to reproduce a simulation sweep.

    :param code: The component code, or its :meth:`~ComponentCodeSpec.to_dict`.
    :param decoder: Decoder settings; its ``mode`` is overridden per
        point by :attr:`modes`.
    :param seed: Base seed; drawn from OS entropy when :const:`None`, and
        then recorded so the sweep can be rerun.

    .. attribute:: code
        :type: ComponentCodeSpec
    .. attribute:: order
        :type: int
        :value: 2

        PAM order.
    .. attribute:: decoder
        :type: DecoderConfig
    .. attribute:: modes
        :type: list[DecoderMode]

        Defaults to ``[decoder.mode]``.
    .. attribute:: snrs
        :type: list[float]

        SNR points in dB, simulated in this order.
    .. attribute:: min_errors
        :type: int
        :value: 500

        A point stops once this many post-decoding bit errors are counted...
    .. attribute:: max_bits
        :type: int
        :value: 1000000000

        ...or once this many bits are counted, whichever comes first.
    .. attribute:: workers
        :type: int
        :value: 1
    .. attribute:: seed
        :type: int
    .. attribute:: stream_blocks
        :type: int
        :value: 200

        Blocks delivered per stream, including the burn-in of ``L``.
    .. attribute:: counting
        :type: CountingConvention
        :value: CountingConvention.ALL_BITS
    .. attribute:: progress
        :type: bool
        :value: False

        Show a :mod:`tqdm` counter on stderr.
    """
    code: ComponentCodeSpec
    order: int = 2
    decoder: DecoderConfig
    modes: List[DecoderMode]
    snrs: List[float]
    min_errors: int = 500
    max_bits: int = 10 ** 9
    workers: int = 1
    seed: int
    stream_blocks: int = 200
    counting: CountingConvention = CountingConvention.ALL_BITS
    progress: bool = False

    def __init__(self, code, snrs: Iterable[float] = (), order: int = 2,
                 decoder=None, modes: Optional[Iterable] = None,
                 min_errors: int = 500, max_bits: int = 10 ** 9,
                 workers: int = 1, seed: Optional[int] = None,
                 stream_blocks: int = 200,
                 counting=CountingConvention.ALL_BITS, progress: bool = False):
        self.code = ComponentCodeSpec.from_data(code)
        if order not in SUPPORTED_ORDERS:
            raise ValueError(
                f'order: modulation order must be one of {SUPPORTED_ORDERS}, got {order}')
        self.order = int(order)
        self.decoder = DecoderConfig.from_data(decoder or {})
        if modes is None:
            modes = [self.decoder.mode]
        self.modes = [DecoderMode(m) for m in modes]
        if not self.modes:
            raise ValueError('modes: at least one decoder mode is required')
        self.snrs = [float(s) for s in snrs]
        for s in self.snrs:
            if not math.isfinite(s):
                raise ValueError(f'snrs: SNR must be finite, got {s}')
        if min_errors < 1:
            raise ValueError(f'min_errors: must be positive, got {min_errors}')
        window_bits = self.decoder.window * self.code.w ** 2
        if max_bits < window_bits:
            raise ValueError(
                f'max_bits: bit budget {max_bits} is below one window of {window_bits} bits; '
                'the stop rule cannot be met')
        if stream_blocks <= self.decoder.window:
            raise ValueError(
                f'stream_blocks: streams of {stream_blocks} blocks deliver nothing past the '
                f'burn-in of {self.decoder.window} blocks')
        if workers < 1:
            raise ValueError(f'workers: must be positive, got {workers}')
        cpus = os.cpu_count() or 1
        if workers > cpus:
            warn(f'{workers} workers requested but only {cpus} CPUs available',
                 StaircaseWarning)
        self.min_errors = int(min_errors)
        self.max_bits = int(max_bits)
        self.workers = int(workers)
        if seed is None:
            seed = int(np.random.SeedSequence().entropy)
        self.seed = int(seed)
        self.stream_blocks = int(stream_blocks)
        self.counting = CountingConvention(counting)
        self.progress = bool(progress)

    def __repr__(self):
        return ('SweepConfig(code={0.code.label}, order={0.order}, '
                'modes={1}, snrs={0.snrs!r}, seed={0.seed})').format(
                    self, [m.value for m in self.modes])

    def __eq__(self, other):
        if not isinstance(other, SweepConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def channel(self, snr_db: float) -> ChannelConfig:
        return ChannelConfig(self.order, snr_db)

    def to_dict(self):
        return {
            'code': self.code.to_dict(),
            'order': self.order,
            'decoder': self.decoder.to_dict(),
            'modes': [m.value for m in self.modes],
            'snrs': list(self.snrs),
            'min_errors': self.min_errors,
            'max_bits': self.max_bits,
            'workers': self.workers,
            'seed': self.seed,
            'stream_blocks': self.stream_blocks,
            'counting': self.counting.value,
            'progress': self.progress,
        }

    @classmethod
    def from_data(cls, data) -> SweepConfig:
        if isinstance(data, cls):
            return data
        return cls(**data)

    def clone(self, **changes) -> SweepConfig:
        data = self.to_dict()
        data.update(changes)
        return type(self)(**data)

class StreamTask(NamedTuple):
    """Picklable description of one stream."""
    code: dict
    order: int
    decoder: dict
    snr_db: float
    seed: int
    snr_index: int
    stream_index: int
    stream_blocks: int
    counting: str

class StreamResult(NamedTuple):
    bits: int
    bit_errors: int
    channel_bit_errors: int
    blocks: int
    miscorrections: int

def stream_rng(seed: int, snr_index: int, stream_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(snr_index, stream_index)))

def _received_groups(spec: ComponentCodeSpec, channel: ChannelConfig,
                     decoder: DecoderConfig, rng: np.random.Generator
                     ) -> Iterator[Tuple[np.ndarray, np.ndarray, object]]:
    # log2(M) blocks share their channel symbols so any w works with any M
    encoder = StaircaseEncoder(spec)
    group = channel.bits_per_symbol
    w = spec.w
    marked = decoder.mode == DecoderMode.MARKED
    while True:
        sent = [encoder.encode(rng.integers(0, 2, size=encoder.info_shape, dtype=np.uint8))
                for _ in range(group)]
        stream = np.concatenate([serialize_bits(b) for b in sent])
        y = transmit(map_symbols(stream, channel), channel, rng)
        llrs = compute_llrs(y, channel).reshape(group, w, w)
        for b, block_llrs in zip(sent, llrs):
            marks = mark_bits(block_llrs, decoder.delta, decoder.quant_bits) if marked else None
            yield b.bits, hard_decisions(block_llrs), marks

def simulate_stream(task: StreamTask) -> StreamResult:
    """Run one stream and count errors on its delivered blocks past the
    burn-in. Block 0 is the known all-zero block and enters error-free."""
    try:
        spec = ComponentCodeSpec.from_data(task.code)
        decoder = DecoderConfig.from_data(task.decoder)
        channel = ChannelConfig(task.order, task.snr_db)
        rng = stream_rng(task.seed, task.snr_index, task.stream_index)
        w, burn_in = spec.w, decoder.window
        info_cols = w if task.counting == CountingConvention.ALL_BITS.value else w - spec.p
        window = DecodingWindow(spec, decoder.window)
        zero = Block.zeros(w)
        window.push(zero, None, zero)
        channel_errors = deque([0])
        delivered = bits = bit_errors = channel_bit_errors = 0
        for sent, received, marks in _received_groups(spec, channel, decoder, rng):
            errors = int(np.count_nonzero(received[:, :info_cols] ^ sent[:, :info_cols]))
            if window.full:
                truth = window.truth[0]
                out = window.slide(received, marks, sent)
                delivered += 1
                before = channel_errors.popleft()
                if delivered > burn_in:
                    bits += w * info_cols
                    bit_errors += int(np.count_nonzero(out[:, :info_cols] ^ truth[:, :info_cols]))
                    channel_bit_errors += before
            else:
                window.push(received, marks, sent)
            channel_errors.append(errors)
            if delivered >= task.stream_blocks:
                break
            if window.full:
                decode_window(window, decoder)
        logger.debug('Stream\t%d\t%d\t%s\t%s', task.snr_index, task.stream_index,
                     bit_errors, dict(window.stats))
        return StreamResult(bits, bit_errors, channel_bit_errors,
                            delivered - burn_in, window.stats['miscorrections'])
    except Exception:
        logger.exception('Stream %d of SNR point %d failed',
                         task.stream_index, task.snr_index)
        raise

def _tasks(sweep: SweepConfig, snr_db: float, snr_index: int,
           mode: DecoderMode, start: int, stop: int) -> List[StreamTask]:
    code = sweep.code.to_dict()
    decoder = sweep.decoder.clone(mode=mode.value).to_dict()
    return [StreamTask(code, sweep.order, decoder, snr_db, sweep.seed, snr_index,
                       s, sweep.stream_blocks, sweep.counting.value)
            for s in range(start, stop)]

def _stream_results(sweep: SweepConfig, snr_db: float, snr_index: int,
                    mode: DecoderMode, pool) -> Iterator[StreamResult]:
    if pool is None:
        for s in count():
            yield simulate_stream(_tasks(sweep, snr_db, snr_index, mode, s, s + 1)[0])
    # bounded batches: a finished point discards at most one batch
    batch = 2 * sweep.workers
    for start in count(0, batch):
        yield from pool.imap(simulate_stream,
                             _tasks(sweep, snr_db, snr_index, mode, start, start + batch))

def run_point(sweep: SweepConfig, snr_db: float, *, snr_index: int = 0,
              mode=None, pool=None) -> SimPoint:
    """Simulate one SNR point for one mode.

    Streams are added in index order until at least
    :attr:`~SweepConfig.min_errors` bit errors or
    :attr:`~SweepConfig.max_bits` bits have been counted.

    :param mode: Defaults to the first of :attr:`SweepConfig.modes`.
    :param pool: A :class:`multiprocessing.pool.Pool` to reuse. One is
        created when :attr:`~SweepConfig.workers` exceeds 1 and none is
        given.
    """
    mode = DecoderMode(mode or sweep.modes[0])
    if pool is None and sweep.workers > 1:
        with Pool(sweep.workers) as own:
            return run_point(sweep, snr_db, snr_index=snr_index, mode=mode, pool=own)
    start = time.perf_counter()
    point = SimPoint(snr_db, mode, sweep.code.label, sweep.order,
                     seed=sweep.seed, snr_index=snr_index)
    with tqdm(total=sweep.min_errors, unit='err', leave=False,
              disable=not sweep.progress,
              desc=f'{mode.value} {snr_db:g} dB') as bar:
        for result in _stream_results(sweep, snr_db, snr_index, mode, pool):
            point.bits += result.bits
            point.bit_errors += result.bit_errors
            point.channel_bit_errors += result.channel_bit_errors
            point.blocks += result.blocks
            point.miscorrections += result.miscorrections
            point.streams += 1
            bar.update(min(result.bit_errors, max(0, sweep.min_errors - bar.n)))
            bar.set_postfix(bits=point.bits)
            if point.bit_errors >= sweep.min_errors or point.bits >= sweep.max_bits:
                break
    point.seconds = time.perf_counter() - start
    if point.bit_errors < sweep.min_errors:
        warn(f'{mode.value} at {snr_db:g} dB stopped at the {sweep.max_bits}-bit '
             f'budget with only {point.bit_errors} errors', StaircaseWarning)
    logger.info('Point\t%s\t%s dB\t%d/%d\tBER %.3e\t%.1fs', mode.value, snr_db,
                point.bit_errors, point.bits, point.ber, point.seconds)
    return point

def run_sweep(sweep: SweepConfig) -> List[SimPoint]:
    """Simulate every SNR (in order) for every mode. All modes at one SNR
    share its per-stream seeds.

    :raises ValueError: if the SNR list is empty.
    """
    if not sweep.snrs:
        raise ValueError('Sweep has no SNR points')
    pool = Pool(sweep.workers) if sweep.workers > 1 else None
    try:
        return [run_point(sweep, snr, snr_index=i, mode=mode, pool=pool)
                for i, snr in enumerate(sweep.snrs) for mode in sweep.modes]
    finally:
        if pool is not None:
            pool.terminate()
