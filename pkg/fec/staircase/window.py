"""Sliding-window iterative decoding of staircase codes.

Pairs of blocks are decoded from the newest to the oldest in every
iteration. Only the codewords of the newest pair ``[Y_(L-2)^T Y_(L-1)]``
take the enhanced path of the marked-bit decoder: miscorrection detection
against zero-syndrome codewords of the previous pair and highly reliable
bits of the newest block, then bit flipping of the least reliable bits
when BDD fails or a miscorrection is detected.
"""
from __future__ import annotations
from typing import Optional, Tuple, Deque, Iterable
from collections import Counter, deque
import numpy as np
from .logger import logger
from .simples import DecoderMode, Verdict
from .bch import ComponentCodeSpec, DecodeOutcome, decode_syndrome, syndromes
from .frame import CodewordAddress, BlockLike, Block, codeword_bits, pair_matrix
from .channel import MarkPlane, MAX_QUANT_BITS

Flips = Tuple[int, ...]

class DecoderConfig:
    """Decoder settings.

    Defaults reproduce the reference setup: a window of 9 blocks,
    7 iterations and an HRB threshold of 10.

    .. attribute:: mode
        :type: DecoderMode
        :value: DecoderMode.MARKED
    .. attribute:: window
        :type: int
        :value: 9

        Window size ``L``; at least 3 since the newest pair is checked
        against the pair before it.
    .. attribute:: iterations
        :type: int
        :value: 7

        Iterations per window position.
    .. attribute:: delta
        :type: float
        :value: 10.0

        HRB threshold on ``|λ|``. :data:`math.inf` marks no HRBs.
    .. attribute:: quant_bits
        :type: Optional[int]
        :value: 5

        Bits of stored reliability per newest-block bit, or
        :const:`None` for exact magnitudes.
    .. attribute:: bit_flipping
        :type: bool
        :value: True

        Marked mode only: flip HUBs on failures and detected
        miscorrections.
    .. attribute:: zero_syndrome_rule
        :type: bool
        :value: True

        Smith and marked modes: reject flips that land on zero-syndrome
        codewords of the previous pair.
    """
    mode: DecoderMode = DecoderMode.MARKED
    window: int = 9
    iterations: int = 7
    delta: float = 10.0
    quant_bits: Optional[int] = 5
    bit_flipping: bool = True
    zero_syndrome_rule: bool = True

    def __init__(self, mode=DecoderMode.MARKED, window: int = 9,
                 iterations: int = 7, delta: float = 10.0,
                 quant_bits: Optional[int] = 5, bit_flipping: bool = True,
                 zero_syndrome_rule: bool = True):
        self.mode = DecoderMode(mode)
        if window < 3:
            raise ValueError(f'Window size must be at least 3, got {window}')
        if iterations < 1:
            raise ValueError(f'Iterations must be at least 1, got {iterations}')
        delta = float(delta)
        if not delta > 0:
            raise ValueError(f'HRB threshold delta must be positive, got {delta}')
        if quant_bits is not None and not 1 <= quant_bits <= MAX_QUANT_BITS:
            raise ValueError(
                f'Quantization bits must be in 1..{MAX_QUANT_BITS}, got {quant_bits}')
        self.window = int(window)
        self.iterations = int(iterations)
        self.delta = delta
        self.quant_bits = quant_bits
        self.bit_flipping = bool(bit_flipping)
        self.zero_syndrome_rule = bool(zero_syndrome_rule)

    def __repr__(self):
        return ('DecoderConfig(mode={0.mode.value!r}, window={0.window}, '
                'iterations={0.iterations}, delta={0.delta!r}, '
                'quant_bits={0.quant_bits!r}, bit_flipping={0.bit_flipping}, '
                'zero_syndrome_rule={0.zero_syndrome_rule})').format(self)

    def __eq__(self, other):
        if not isinstance(other, DecoderConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def hrb_rule(self) -> bool:
        return self.mode == DecoderMode.MARKED

    @property
    def flips_hubs(self) -> bool:
        return self.mode == DecoderMode.MARKED and self.bit_flipping

    def to_dict(self):
        return {
            'mode': self.mode.value,
            'window': self.window,
            'iterations': self.iterations,
            'delta': self.delta,
            'quant_bits': self.quant_bits,
            'bit_flipping': self.bit_flipping,
            'zero_syndrome_rule': self.zero_syndrome_rule,
        }

    @classmethod
    def from_data(cls, data) -> DecoderConfig:
        if isinstance(data, cls):
            return data
        return cls(**data)

    def clone(self, **changes) -> DecoderConfig:
        data = self.to_dict()
        data.update(changes)
        return type(self)(**data)

def _array(block: BlockLike) -> np.ndarray:
    return block.bits if isinstance(block, Block) else np.asarray(block, dtype=np.uint8)

class DecodingWindow:
    """The ``L`` most recent received blocks and their decoding state.

    Pair ``i`` (``1 <= i <= L-1``) couples window blocks ``i-1`` and ``i``;
    :attr:`syndromes` caches the packed syndrome of every codeword of
    every pair and is updated incrementally by :meth:`flip`.

    :param ComponentCodeSpec spec: Component code.
    :param int size: ``L``.

    .. attribute:: blocks
        :type: collections.deque[numpy.ndarray]

        Hard bits, oldest first.
    .. attribute:: syndromes
        :type: collections.deque[Optional[numpy.ndarray]]

        ``syndromes[i]`` holds the ``w`` syndromes of pair ``i``;
        ``syndromes[0]`` is :const:`None`.
    .. attribute:: truth
        :type: collections.deque[Optional[numpy.ndarray]]

        Transmitted blocks aligned with :attr:`blocks`, where known.
        Only genie modes and miscorrection accounting read it.
    .. attribute:: marks
        :type: Optional[MarkPlane]

        Marks of the newest block only.
    .. attribute:: stats
        :type: collections.Counter

        Event counters (decodes, failures, rejections, bit-flipping
        attempts and acceptances, logged miscorrections, flipped bits).
    """
    spec: ComponentCodeSpec
    size: int
    blocks: Deque[np.ndarray]
    syndromes: Deque[Optional[np.ndarray]]
    truth: Deque[Optional[np.ndarray]]
    marks: Optional[MarkPlane]
    stats: Counter

    def __init__(self, spec: ComponentCodeSpec, size: int = 9):
        if size < 3:
            raise ValueError(f'Window size must be at least 3, got {size}')
        self.spec = spec
        self.size = size
        self.blocks = deque(maxlen=size)
        self.syndromes = deque(maxlen=size)
        self.truth = deque(maxlen=size)
        self.marks = None
        self.stats = Counter()
        self._columns = spec._columns

    def __repr__(self):
        return (f'DecodingWindow(spec={self.spec.label}, size={self.size}, '
                f'resident={len(self.blocks)})')

    def __len__(self):
        return len(self.blocks)

    @property
    def full(self) -> bool:
        return len(self.blocks) == self.size

    @property
    def newest_pair(self) -> int:
        return self.size - 1

    def _enter(self, block: BlockLike, marks: Optional[MarkPlane],
               truth: Optional[BlockLike]):
        w = self.spec.w
        bits = np.array(_array(block), dtype=np.uint8)
        if bits.shape != (w, w):
            raise ValueError(f'Block must be {w}x{w}, got {bits.shape}')
        if marks is not None and marks.shape != (w, w):
            marks = marks.reshape(w, w)
        if self.blocks:
            syn = syndromes(self.spec, pair_matrix(self.blocks[-1], bits))
        else:
            syn = None
        self.blocks.append(bits)
        self.syndromes.append(syn)
        self.syndromes[0] = None
        self.truth.append(None if truth is None else np.asarray(_array(truth), dtype=np.uint8))
        self.marks = marks

    def push(self, block: BlockLike, marks: Optional[MarkPlane] = None,
             truth: Optional[BlockLike] = None):
        """Add a block while the window is filling up.

        :raises ValueError: if the window is already full.
        """
        if self.full:
            raise ValueError('Window is full; use slide()')
        self._enter(block, marks, truth)

    def slide(self, block: BlockLike, marks: Optional[MarkPlane] = None,
              truth: Optional[BlockLike] = None) -> np.ndarray:
        """Deliver the oldest block and shift ``block`` in as the newest.
        The previous newest block's marks are dropped.

        :returns: The delivered block. It is no longer referenced by the
            window and will not change.
        :raises ValueError: if the window is not full.
        """
        if not self.full:
            raise ValueError(
                f'Window holds {len(self.blocks)} of {self.size} blocks')
        delivered = self.blocks[0]
        self._enter(block, marks, truth)
        return delivered

    def codeword(self, address: CodewordAddress) -> np.ndarray:
        i = address.pair
        return codeword_bits(self.blocks[i - 1], self.blocks[i], address.row)

    def true_codeword(self, address: CodewordAddress) -> np.ndarray:
        i = address.pair
        older, newer = self.truth[i - 1], self.truth[i]
        if older is None or newer is None:
            raise ValueError(f'No transmitted blocks known for pair {i}')
        return codeword_bits(older, newer, address.row)

    def has_truth(self, address: CodewordAddress) -> bool:
        i = address.pair
        return self.truth[i - 1] is not None and self.truth[i] is not None

    def syndrome_of(self, address: CodewordAddress) -> int:
        return int(self.syndromes[address.pair][address.row])

    def flip(self, block: int, row: int, col: int):
        """Flip one bit and update the two codeword syndromes it enters."""
        w = self.spec.w
        self.blocks[block][row, col] ^= 1
        if block >= 1:
            self.syndromes[block][row] ^= self._columns[w + col]
        if block + 1 < len(self.blocks):
            self.syndromes[block + 1][col] ^= self._columns[row]

    def apply(self, address: CodewordAddress, positions: Iterable[int]):
        w = self.spec.w
        for k in positions:
            self.flip(*address.locate(w, k))

    def verify_syndromes(self) -> bool:
        """Recompute every cached syndrome from scratch and compare."""
        for i in range(1, len(self.blocks)):
            fresh = syndromes(self.spec, pair_matrix(self.blocks[i - 1], self.blocks[i]))
            if not np.array_equal(fresh, self.syndromes[i]):
                return False
        return True

def _accept(window: DecodingWindow, address: CodewordAddress,
            positions: Flips) -> Flips:
    if not positions:
        return positions
    if window.has_truth(address):
        errors = np.flatnonzero(window.codeword(address) ^ window.true_codeword(address))
        if tuple(errors) != tuple(positions):
            window.stats['miscorrections'] += 1
    window.apply(address, positions)
    window.stats['flipped_bits'] += len(positions)
    return positions

def decode_codeword(window: DecodingWindow, address: CodewordAddress) -> Flips:
    """Plain iterative-BDD step: accept whatever BDD returns."""
    outcome = decode_syndrome(window.spec, window.syndrome_of(address))
    window.stats['decodes'] += 1
    if not outcome.corrected:
        window.stats['bdd_failures'] += 1
        return ()
    return _accept(window, address, outcome.positions)

def md_check(window: DecodingWindow, address: CodewordAddress,
             positions: Iterable[int], *, zero_syndrome_rule: bool = True,
             hrb_rule: bool = True) -> Verdict:
    """Miscorrection detection for a proposed flip set of a codeword.

    Flags a miscorrection if a flip in the older block lands on a
    codeword of the previous pair whose syndrome is currently zero, or
    a flip in the newest block lands on an HRB.
    """
    pair, w = address.pair, window.spec.w
    previous = window.syndromes[pair - 1] if pair >= 2 else None
    hrb = (window.marks.hrb[address.row]
           if hrb_rule and window.marks is not None and pair == window.newest_pair
           else None)
    for k in positions:
        if k < w:
            if zero_syndrome_rule and previous is not None and previous[k] == 0:
                return Verdict.MISCORRECTION
        elif hrb is not None and hrb[k - w]:
            return Verdict.MISCORRECTION
    return Verdict.PASS

def _require_newest(window: DecodingWindow, address: CodewordAddress):
    if address.pair != window.newest_pair:
        raise ValueError(
            f'Address {address} is not in the newest pair {window.newest_pair}')

def bit_flip_recover(window: DecodingWindow, address: CodewordAddress,
                     outcome: DecodeOutcome,
                     config: Optional[DecoderConfig] = None) -> Optional[Flips]:
    """Try to rescue a newest-pair codeword by flipping its least
    reliable newest-block bits and decoding again.

    On a BDD failure one HUB is flipped; on a detected miscorrection with
    error weight ``w_H(e)``, ``d0 - w_H(e) - t`` HUBs are. The window
    itself is never modified.

    :returns: The net flip set if the second decoding succeeds and
        passes :func:`md_check`, else :const:`None`.
    """
    _require_newest(window, address)
    config = config or DecoderConfig()
    spec = window.spec
    w, t = spec.w, spec.t
    count = spec.d0 - outcome.weight - t if outcome.corrected else 1
    if window.marks is None or count < 1:
        return None
    pool = window.marks.hub_candidates(address.row, t + 2)
    if len(pool) < count:
        window.stats['bf_give_ups'] += 1
        return None
    hubs = [w + int(c) for c in pool[:count]]
    syn = window.syndrome_of(address)
    for k in hubs:
        syn ^= window._columns[k]
    second = decode_syndrome(spec, syn)
    if not second.corrected:
        return None
    flips = tuple(sorted(set(hubs).symmetric_difference(second.positions)))
    verdict = md_check(window, address, flips,
                       zero_syndrome_rule=config.zero_syndrome_rule,
                       hrb_rule=config.hrb_rule)
    if verdict != Verdict.PASS:
        return None
    return flips

def decode_codeword_enhanced(window: DecodingWindow, address: CodewordAddress,
                             config: DecoderConfig) -> Flips:
    """Newest-pair decoding: BDD, then miscorrection detection on success
    and bit flipping on failure or detected miscorrection. Either the
    accepted flips are applied or the codeword stays as received.

    :returns: The flips applied (empty if none).
    """
    _require_newest(window, address)
    stats = window.stats
    outcome = decode_syndrome(window.spec, window.syndrome_of(address))
    stats['decodes'] += 1
    if outcome.corrected:
        verdict = md_check(window, address, outcome.positions,
                           zero_syndrome_rule=config.zero_syndrome_rule,
                           hrb_rule=config.hrb_rule)
        if verdict == Verdict.PASS:
            return _accept(window, address, outcome.positions)
        stats['md_rejections'] += 1
        case = 'case2'
    else:
        stats['bdd_failures'] += 1
        case = 'case1'
    if not config.flips_hubs:
        return ()
    stats[case + '_attempts'] += 1
    flips = bit_flip_recover(window, address, outcome, config)
    if flips is None:
        return ()
    stats[case + '_accepts'] += 1
    if config.hrb_rule and window.marks is not None:
        assert not any(k >= window.spec.w and window.marks.hrb[address.row, k - window.spec.w]
                       for k in flips), 'accepted flip on an HRB'
    return _accept(window, address, flips)

def _true_errors(window: DecodingWindow, address: CodewordAddress) -> np.ndarray:
    if not window.has_truth(address):
        raise ValueError(f'Genie decoding of {address} needs the transmitted blocks')
    return np.flatnonzero(window.codeword(address) ^ window.true_codeword(address))

def genie_mcf_decode(window: DecodingWindow, address: CodewordAddress) -> Optional[Flips]:
    """Miscorrection-free BDD: decode only words holding at most ``t``
    errors.

    :returns: The flips applied, or :const:`None` for a failure.
    :raises ValueError: if the transmitted blocks are unknown.
    """
    errors = _true_errors(window, address)
    window.stats['decodes'] += 1
    if len(errors) > window.spec.t:
        window.stats['genie_rejections'] += 1
        return None
    outcome = decode_syndrome(window.spec, window.syndrome_of(address))
    return _accept(window, address, outcome.positions)

def genie_lb_decode(window: DecodingWindow, address: CodewordAddress) -> Optional[Flips]:
    """Idealized marked-bit decoding of a newest-pair codeword.

    Every miscorrection is detected. A word with ``t + j`` errors, where
    ``j`` is 1 after a BDD failure or ``d0 - w_H(e) - t`` after a
    miscorrection, gets ``j`` of its newest-block errors flipped (lowest
    bit first) and is decoded again; with fewer than ``j`` errors in the
    newest block, or if the second decoding does not reach the
    transmitted codeword, it is a failure.

    :returns: The flips applied, or :const:`None` for a failure.
    :raises ValueError: if the transmitted blocks are unknown.
    """
    _require_newest(window, address)
    spec = window.spec
    errors = _true_errors(window, address)
    window.stats['decodes'] += 1
    outcome = decode_syndrome(spec, window.syndrome_of(address))
    if len(errors) <= spec.t:
        return _accept(window, address, outcome.positions)
    if outcome.corrected:
        window.stats['md_rejections'] += 1
        j = spec.d0 - outcome.weight - spec.t
    else:
        window.stats['bdd_failures'] += 1
        j = 1
    newest = errors[errors >= spec.w]
    if len(newest) < j:
        window.stats['genie_rejections'] += 1
        return None
    flipped = [int(k) for k in newest[:j]]
    syn = window.syndrome_of(address)
    for k in flipped:
        syn ^= window._columns[k]
    second = decode_syndrome(spec, syn)
    remaining = set(int(k) for k in errors) - set(flipped)
    if not second.corrected or set(second.positions) != remaining:
        window.stats['genie_rejections'] += 1
        return None
    return _accept(window, address, tuple(int(k) for k in errors))

def run_iteration(window: DecodingWindow, config: DecoderConfig) -> int:
    """One decoding iteration over all pairs, newest to oldest, rows in
    ascending order.

    :returns: The number of bits flipped.
    """
    if not window.full:
        raise ValueError(
            f'Window holds {len(window.blocks)} of {window.size} blocks')
    mode = config.mode
    newest = window.newest_pair
    before = window.stats['flipped_bits']
    for pair in range(newest, 0, -1):
        syn = window.syndromes[pair]
        for row in np.flatnonzero(syn).tolist():
            if not syn[row]:
                continue
            address = CodewordAddress(pair, row)
            if mode == DecoderMode.GENIE_MCF:
                genie_mcf_decode(window, address)
            elif pair != newest or mode == DecoderMode.STANDARD:
                decode_codeword(window, address)
            elif mode == DecoderMode.GENIE_LB:
                genie_lb_decode(window, address)
            else:
                decode_codeword_enhanced(window, address, config)
    return window.stats['flipped_bits'] - before

def decode_window(window: DecodingWindow, config: DecoderConfig) -> int:
    """Run up to ``config.iterations`` iterations, stopping early once an
    iteration changes nothing (further ones would repeat it exactly).

    :returns: The number of iterations run.
    """
    for iteration in range(1, config.iterations + 1):
        if not run_iteration(window, config):
            return iteration
    return config.iterations

def slide(window: DecodingWindow, new_block: BlockLike,
          new_marks: Optional[MarkPlane] = None,
          truth: Optional[BlockLike] = None) -> Tuple[np.ndarray, DecodingWindow]:
    """Functional form of :meth:`DecodingWindow.slide`."""
    delivered = window.slide(new_block, new_marks, truth)
    logger.debug('Delivered block, window stats %s', dict(window.stats))
    return delivered, window
