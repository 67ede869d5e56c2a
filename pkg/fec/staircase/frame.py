from __future__ import annotations
from typing import Optional, Tuple, Union
from fractions import Fraction
import numpy as np
from .logger import logger
from .bch import ComponentCodeSpec, build_code, bch_encode

class Block:
    """A ``w x w`` staircase block of hard bits.

    .. attribute:: bits
        :type: numpy.ndarray

        ``uint8`` matrix of shape ``(w, w)``.
    .. attribute:: index
        :type: int
        :value: 0

        Position of the block in its stream. Block 0 is the all-zero
        initial block.
    """
    bits: np.ndarray
    index: int = 0

    def __init__(self, bits, index: int = 0):
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
            raise ValueError(f'Block must be square, got shape {bits.shape}')
        self.bits = bits
        self.index = int(index)

    @classmethod
    def zeros(cls, w: int, index: int = 0) -> Block:
        return cls(np.zeros((w, w), dtype=np.uint8), index)

    @property
    def w(self) -> int:
        return self.bits.shape[0]

    def copy(self) -> Block:
        return type(self)(self.bits.copy(), self.index)

    def __eq__(self, other):
        if not isinstance(other, Block):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f'Block(w={self.w}, index={self.index})'

BlockLike = Union[Block, np.ndarray]

def _bits_of(block: BlockLike) -> np.ndarray:
    return block.bits if isinstance(block, Block) else np.asarray(block, dtype=np.uint8)

class CodewordAddress:
    """Location of a component codeword inside a decoding window.

    Pair ``i`` couples window blocks ``i-1`` (older) and ``i`` (newer):
    codeword ``(i, j)`` is column ``j`` of the older block followed by
    row ``j`` of the newer one. Rows and bits count from 0.

    .. attribute:: pair
        :type: int

        ``1 <= pair <= L-1``.
    .. attribute:: row
        :type: int

        ``0 <= row < w``.
    .. attribute:: bit
        :type: Optional[int]

        ``0 <= bit < 2w`` when addressing a single bit.
    """
    pair: int
    row: int
    bit: Optional[int] = None

    def __init__(self, pair: int, row: int, bit: Optional[int] = None):
        if pair < 1:
            raise ValueError(f'Pair position must be at least 1, got {pair}')
        if row < 0:
            raise ValueError(f'Row must be non-negative, got {row}')
        if bit is not None and bit < 0:
            raise ValueError(f'Bit must be non-negative, got {bit}')
        self.pair = pair
        self.row = row
        self.bit = bit

    def __repr__(self):
        return f'CodewordAddress(pair={self.pair}, row={self.row}, bit={self.bit})'

    def __eq__(self, other):
        if not isinstance(other, CodewordAddress):
            return NotImplemented
        return (self.pair, self.row, self.bit) == (other.pair, other.row, other.bit)

    def __hash__(self):
        return hash((self.pair, self.row, self.bit))

    def locate(self, w: int, bit: Optional[int] = None) -> Tuple[int, int, int]:
        """``(block, row, column)`` of a codeword bit within the window.

        :param int w: Block width.
        :param bit: Defaults to :attr:`bit`.
        :raises ValueError: if the bit index is out of range.
        """
        k = self.bit if bit is None else bit
        if k is None or not 0 <= k < 2 * w:
            raise ValueError(f'Bit index must be in 0..{2 * w - 1}, got {k}')
        if self.row >= w:
            raise ValueError(f'Row must be below {w}, got {self.row}')
        if k < w:
            return self.pair - 1, k, self.row
        return self.pair, self.row, k - w

    @classmethod
    def of_bit(cls, w: int, pair: int, block: int, row: int,
               col: int) -> CodewordAddress:
        """Inverse of :meth:`locate` for a cell of one of the two blocks
        of ``pair``.

        :raises ValueError: if the cell is outside both blocks.
        """
        if not (0 <= row < w and 0 <= col < w):
            raise ValueError(f'Cell ({row}, {col}) is outside a {w}x{w} block')
        if block == pair - 1:
            return cls(pair, col, row)
        if block == pair:
            return cls(pair, row, w + col)
        raise ValueError(f'Block {block} is not part of pair {pair}')

def codeword_bits(older: BlockLike, newer: BlockLike, row: int) -> np.ndarray:
    """The ``2w`` bits of codeword ``row`` of the pair ``[older^T newer]``."""
    return np.concatenate([_bits_of(older)[:, row], _bits_of(newer)[row, :]])

def pair_matrix(older: BlockLike, newer: BlockLike) -> np.ndarray:
    """``[older^T newer]``: one component codeword per row."""
    return np.hstack([_bits_of(older).T, _bits_of(newer)])

def encode_block(spec: ComponentCodeSpec, prev: BlockLike, info) -> Block:
    """Compute the next staircase block.

    Row ``j`` of the result is ``info[j]`` followed by the ``p`` parity bits
    that make ``(column j of prev, row j of result)`` a codeword.

    :param ComponentCodeSpec spec: Component code.
    :param prev: The previous block ``B_(i-1)``.
    :param info: ``w x (w-p)`` information bits.
    :raises ValueError: on any dimension mismatch.
    """
    w, p = spec.w, spec.p
    if w <= p:
        raise ValueError(
            f'{spec.label} leaves no information bits per block (w={w}, p={p})')
    prev_bits = _bits_of(prev)
    info = np.asarray(info, dtype=np.uint8)
    if prev_bits.shape != (w, w):
        raise ValueError(f'Previous block must be {w}x{w}, got {prev_bits.shape}')
    if info.shape != (w, w - p):
        raise ValueError(
            f'Information bits must be {w}x{w - p}, got {info.shape}')
    codewords = bch_encode(spec, np.hstack([prev_bits.T, info]))
    index = prev.index + 1 if isinstance(prev, Block) else 0
    return Block(codewords[:, w:], index)

def serialize_bits(block: BlockLike) -> np.ndarray:
    """Row-major bit stream of a block (the transmission order)."""
    return np.ascontiguousarray(_bits_of(block)).reshape(-1)

def deserialize_bits(stream, w: int, index: int = 0) -> Block:
    """Inverse of :func:`serialize_bits`.

    :raises ValueError: if the stream is not ``w*w`` bits long.
    """
    stream = np.asarray(stream, dtype=np.uint8)
    if stream.shape != (w * w,):
        raise ValueError(f'Expected {w * w} bits, got shape {stream.shape}')
    return Block(stream.reshape(w, w).copy(), index)

def code_rate(spec: ComponentCodeSpec) -> Fraction:
    """Staircase code rate ``R = 2k_c/n_c - 1 = 1 - p/w``."""
    return spec.rate

def shorten_spec(mother_spec: ComponentCodeSpec, s: int) -> ComponentCodeSpec:
    """Shorten a component code by ``s`` more information bits.

    :raises ValueError: if the result would have odd length or no
        information bits.
    """
    if s < 0:
        raise ValueError(f'Shortening must be non-negative, got {s}')
    if s >= mother_spec.k:
        raise ValueError(
            f'Cannot shorten {mother_spec.label} by {s}: '
            'no information bits would remain')
    return build_code(mother_spec.field.degree, mother_spec.t,
                      mother_spec.shortening + s,
                      mother_spec.field.primitive_poly)

class StaircaseEncoder:
    """Streaming staircase encoder, starting from the all-zero ``B_0``.

    .. attribute:: spec
        :type: ComponentCodeSpec
    .. attribute:: last
        :type: Block

        The most recently produced block.
    """
    spec: ComponentCodeSpec
    last: Block

    def __init__(self, spec: ComponentCodeSpec):
        if spec.w <= spec.p:
            raise ValueError(
                f'{spec.label} leaves no information bits per block')
        self.spec = spec
        self.last = Block.zeros(spec.w)

    @property
    def info_shape(self) -> Tuple[int, int]:
        return self.spec.w, self.spec.w - self.spec.p

    def encode(self, info) -> Block:
        self.last = encode_block(self.spec, self.last, info)
        logger.debug('Encoded block %d', self.last.index)
        return self.last
