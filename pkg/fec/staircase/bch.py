from __future__ import annotations
from typing import Optional, Iterable, Sequence, Tuple, List, Union
from fractions import Fraction
from functools import lru_cache
import numpy as np
from .logger import logger
from .simples import OutcomeTag
from .gf import FieldTable, build_field, gf2_polymul

BitsLike = Union[np.ndarray, Sequence[int]]

class ComponentCodeSpec:
    """An extended, optionally shortened, narrow-sense binary BCH code.

    The mother code is the length ``2^m - 1`` BCH code with designed
    distance ``2t + 1``, extended by one overall parity bit to length
    ``2^m``. Shortening removes ``s`` leading information positions, which
    are implicit zeros and never transmitted.

    Codewords are laid out as ``[message (k_c) | BCH parity (p-1) |
    overall parity (1)]``. Array index ``i < n_c - 1`` carries the
    coefficient of ``x^(n_c - 2 - i)``.

    Construction is comparatively expensive; use :func:`build_code` to
    share instances. Instances are read-only after construction.

    :param int degree: Field degree ``m``.
    :param int t: Correction radius.
    :param int shortening: Number of shortened bits ``s``.
    :param primitive_poly: Field polynomial, see :func:`build_field`.
    :type primitive_poly: Optional[int]

    :raises ValueError: if ``t`` is not positive or too large to pack.
    :raises ValueError:
        if the shortening leaves an odd length or no information bits.

    .. attribute:: field
        :type: FieldTable
    .. attribute:: t
        :type: int
    .. attribute:: n_mother
        :type: int

        ``2^m`` (extended length).
    .. attribute:: k_mother
        :type: int
    .. attribute:: shortening
        :type: int
    .. attribute:: n
        :type: int

        Effective length ``n_c``.
    .. attribute:: k
        :type: int

        Effective dimension ``k_c``.
    .. attribute:: generator
        :type: int

        Generator polynomial bitmask (product of the minimal polynomials
        of ``α, α^3, ..., α^(2t-1)``).
    .. attribute:: column_syndromes
        :type: numpy.ndarray

        Packed syndrome contribution of every codeword position: odd power
        sums ``S1, S3, ...`` in consecutive ``m``-bit fields, then the
        overall parity bit. The syndrome of a word is the XOR of the
        entries at its set positions.
    """
    field: FieldTable
    t: int
    n_mother: int
    k_mother: int
    shortening: int
    n: int
    k: int
    generator: int
    column_syndromes: np.ndarray

    def __init__(self, degree: int, t: int = 2, shortening: int = 0,
                 primitive_poly: Optional[int] = None):
        field = build_field(degree, primitive_poly)
        if t < 1:
            raise ValueError(f'Correction radius must be positive, got t={t}')
        if t * degree + 1 > 62:
            raise ValueError(f't={t} is too large for GF(2^{degree})')
        generator = 1
        seen = set()
        for s in range(1, 2 * t, 2):
            coset = frozenset(field.cyclotomic_coset(s))
            if coset in seen:
                continue
            seen.add(coset)
            generator = gf2_polymul(generator, field.minimal_polynomial(s))
        k_mother = field.order - (generator.bit_length() - 1)
        if k_mother <= 0:
            raise ValueError(
                f'No BCH code with t={t} exists over GF(2^{degree})')
        if not 0 <= shortening < k_mother:
            raise ValueError(
                f'Shortening must be in 0..{k_mother - 1}, got {shortening}')
        n = field.order + 1 - shortening
        if n % 2:
            raise ValueError(
                f'Shortening by {shortening} leaves odd length {n}')
        self.field = field
        self.t = t
        self.n_mother = field.order + 1
        self.k_mother = k_mother
        self.shortening = shortening
        self.n = n
        self.k = k_mother - shortening
        self.generator = generator
        self._build_tables()
        logger.debug('Built component code %s, generator %#x',
                     self.label, generator)

    @classmethod
    def from_params(cls, n_mother: int, k_mother: int, t: int,
                    shortening: int = 0,
                    primitive_poly: Optional[int] = None) -> ComponentCodeSpec:
        """Construct from the mother ``(n, k, t)`` triple, checking that the
        triple names an extended BCH code.

        :raises ValueError: if ``n_mother`` is not a power of two or the
            dimension does not match.
        """
        degree = n_mother.bit_length() - 1
        if n_mother < 2 or 1 << degree != n_mother:
            raise ValueError(
                f'Extended BCH length must be a power of two, got {n_mother}')
        spec = build_code(degree, t, shortening, primitive_poly)
        if spec.k_mother != k_mother:
            raise ValueError(
                f'({n_mother},{k_mother},{t}) is not an extended BCH code; '
                f'the dimension is {spec.k_mother}')
        return spec

    def _build_tables(self):
        m, n, t = self.field.degree, self.n, self.t
        field = self.field
        p = self.p
        # x^d mod g(x) for every transmitted degree
        remainders = []
        r = 1
        top = 1 << (p - 1)
        for _ in range(n - 1):
            remainders.append(r)
            r <<= 1
            if r & top:
                r ^= self.generator
        parity = np.zeros((self.k, p), dtype=np.uint8)
        for i in range(self.k):
            rem = remainders[n - 2 - i]
            for d in range(p - 1):
                if rem >> d & 1:
                    parity[i, p - 2 - d] = 1
            parity[i, p - 1] = (1 + bin(rem).count('1')) & 1
        parity.setflags(write=False)
        self._parity_matrix = parity

        parity_bit = 1 << (t * m)
        columns = np.zeros(n, dtype=np.int64)
        position_of_degree = [-1] * field.order
        for i in range(n - 1):
            d = n - 2 - i
            position_of_degree[d] = i
            packed = parity_bit
            for l in range(t):
                packed |= field.alpha((2 * l + 1) * d) << (l * m)
            columns[i] = packed
        columns[n - 1] = parity_bit
        columns.setflags(write=False)
        self.column_syndromes = columns
        self._columns = tuple(int(c) for c in columns)
        self._position_of_degree = tuple(position_of_degree)
        self._field_mask = (1 << m) - 1
        self._inner_mask = (1 << (t * m)) - 1

    def __repr__(self):
        return ('ComponentCodeSpec(n={0.n}, k={0.k}, t={0.t}, '
                'n_mother={0.n_mother}, k_mother={0.k_mother}, '
                'shortening={0.shortening})').format(self)

    def __eq__(self, other):
        if not isinstance(other, ComponentCodeSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(tuple(self.to_dict().values()))

    def __reduce__(self):
        return (build_code, (self.field.degree, self.t, self.shortening,
                             self.field.primitive_poly))

    @property
    def label(self) -> str:
        """``(n_c,k_c,t)``, as printed in result files."""
        return f'({self.n},{self.k},{self.t})'

    @property
    def w(self) -> int:
        """Staircase block width ``n_c / 2``."""
        return self.n // 2

    @property
    def p(self) -> int:
        """Parity bits per component codeword ``n_c - k_c``."""
        return self.n - self.k

    @property
    def d0(self) -> int:
        """Minimum Hamming distance of the extended code, ``2t + 2``."""
        return 2 * self.t + 2

    @property
    def rate(self) -> Fraction:
        """Staircase code rate ``2k_c/n_c - 1``, exact."""
        return Fraction(2 * self.k, self.n) - 1

    @property
    def parity_matrix(self) -> np.ndarray:
        """Systematic parity part ``P`` (``k_c x p``): a codeword is
        ``[u | uP mod 2]``."""
        return self._parity_matrix

    def to_dict(self):
        return {
            'n_mother': self.n_mother,
            'k_mother': self.k_mother,
            't': self.t,
            'shortening': self.shortening,
            'primitive_poly': self.field.primitive_poly,
        }

    @classmethod
    def from_data(cls, data) -> ComponentCodeSpec:
        if isinstance(data, cls):
            return data
        return cls.from_params(
            data['n_mother'], data['k_mother'], data['t'],
            data.get('shortening', 0), data.get('primitive_poly'))

    def position_of_degree(self, degree: int) -> int:
        """Array index of the coefficient of ``x^degree``, or -1 if that
        coefficient was shortened away."""
        return self._position_of_degree[degree]

    def _locate(self, syndrome: int) -> Optional[List[int]]:
        """Error degrees of the inner BCH word, or None past radius t."""
        field, m = self.field, self.field.degree
        fmask = self._field_mask
        s1 = syndrome & fmask
        if self.t == 1:
            return [field.log[s1]] if s1 else None
        if self.t == 2:
            s3 = (syndrome >> m) & fmask
            if s1 == 0:
                return None
            s1_cubed = field.pow(s1, 3)
            if s3 == s1_cubed:
                return [field.log[s1]]
            # X1 + X2 = S1, X1 X2 = (S3 + S1^3) / S1
            product = field.div(s3 ^ s1_cubed, s1)
            u = field.solve_quadratic(field.div(product, field.mul(s1, s1)))
            if u is None:
                return None
            x1 = field.mul(s1, u)
            return [field.log[x1], field.log[x1 ^ s1]]
        return self._locate_generic(syndrome)

    def _locate_generic(self, syndrome: int) -> Optional[List[int]]:
        # Berlekamp-Massey followed by a Chien search
        field, m, t = self.field, self.field.degree, self.t
        odd = [(syndrome >> (l * m)) & self._field_mask for l in range(t)]
        S = [0] * (2 * t + 1)
        for l, value in enumerate(odd):
            S[2 * l + 1] = value
        for j in range(2, 2 * t + 1, 2):
            S[j] = field.mul(S[j // 2], S[j // 2])
        C, B = [1], [1]
        L, shift, b = 0, 1, 1
        for r in range(1, 2 * t + 1):
            d = S[r]
            for i in range(1, L + 1):
                if i < len(C):
                    d ^= field.mul(C[i], S[r - i])
            if d == 0:
                shift += 1
                continue
            coef = field.div(d, b)
            update = [0] * shift + [field.mul(coef, x) for x in B]
            T = C[:]
            if len(update) > len(C):
                C = C + [0] * (len(update) - len(C))
            for i, x in enumerate(update):
                C[i] ^= x
            if 2 * L <= r - 1:
                L = r - L
                B, b, shift = T, d, 1
            else:
                shift += 1
        while len(C) > 1 and C[-1] == 0:
            C.pop()
        if L > t or len(C) - 1 != L:
            return None
        degrees = []
        for d in range(field.order):
            x_inv = field.alpha(-d)
            acc, xp = 0, 1
            for c in C:
                acc ^= field.mul(c, xp)
                xp = field.mul(xp, x_inv)
            if acc == 0:
                degrees.append(d)
        if len(degrees) != L:
            return None
        return degrees

class DecodeOutcome:
    """Result of :func:`bdd_decode`.

    .. attribute:: tag
        :type: OutcomeTag
    .. attribute:: positions
        :type: tuple[int, ...]

        Sorted codeword positions to flip. Empty on failure and for
        zero-syndrome words.
    """
    tag: OutcomeTag
    positions: Tuple[int, ...]

    def __init__(self, tag: OutcomeTag, positions: Iterable[int] = ()):
        self.tag = OutcomeTag(tag)
        self.positions = tuple(sorted(positions))
        if self.tag == OutcomeTag.FAILURE and self.positions:
            raise ValueError('A failed decoding flips no positions')

    @classmethod
    def failure(cls) -> DecodeOutcome:
        return cls(OutcomeTag.FAILURE)

    @property
    def corrected(self) -> bool:
        return self.tag == OutcomeTag.CORRECTED

    @property
    def weight(self) -> int:
        """``w_H(e)``, the number of flipped positions."""
        return len(self.positions)

    def __eq__(self, other):
        if not isinstance(other, DecodeOutcome):
            return NotImplemented
        return self.tag == other.tag and self.positions == other.positions

    def __hash__(self):
        return hash((self.tag, self.positions))

    def __repr__(self):
        return f'DecodeOutcome({self.tag.name}, positions={self.positions})'

_FAILURE = DecodeOutcome.failure()

def build_code(degree: int, t: int = 2, shortening: int = 0,
               primitive_poly: Optional[int] = None) -> ComponentCodeSpec:
    """Cached :class:`ComponentCodeSpec` constructor. Equal parameters
    always give the same instance."""
    poly = build_field(degree, primitive_poly).primitive_poly
    return _cached_code(degree, t, shortening, poly)

@lru_cache(maxsize=None)
def _cached_code(degree: int, t: int, shortening: int,
                 primitive_poly: int) -> ComponentCodeSpec:
    return ComponentCodeSpec(degree, t, shortening, primitive_poly)

def _as_bits(bits: BitsLike, length: int, what: str) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8)
    if arr.shape[-1:] != (length,):
        raise ValueError(
            f'{what} must have {length} bits, got shape {arr.shape}')
    return arr

def bch_encode(spec: ComponentCodeSpec, message: BitsLike) -> np.ndarray:
    """Systematically encode ``k_c`` message bits into ``n_c`` code bits.

    Also accepts a 2-D array with one message per row.

    :raises ValueError: if the last axis is not ``k_c`` long.
    """
    msg = _as_bits(message, spec.k, 'Message')
    parity = (msg.astype(np.int64) @ spec.parity_matrix) & 1
    return np.concatenate([msg, parity.astype(np.uint8)], axis=-1)

def syndrome(spec: ComponentCodeSpec, r: BitsLike) -> int:
    """Packed syndrome of an ``n_c``-bit word (0 iff it is a codeword)."""
    bits = _as_bits(r, spec.n, 'Received word')
    if bits.ndim != 1:
        raise ValueError('syndrome() takes a single word')
    return int(np.bitwise_xor.reduce(spec.column_syndromes[bits.astype(bool)]))

def syndromes(spec: ComponentCodeSpec, words: np.ndarray) -> np.ndarray:
    """Packed syndromes of every row of a 2-D bit array."""
    words = _as_bits(words, spec.n, 'Received word')
    return np.bitwise_xor.reduce(
        np.where(words.astype(bool), spec.column_syndromes, 0), axis=-1)

def decode_syndrome(spec: ComponentCodeSpec, syn: int) -> DecodeOutcome:
    """Bounded-distance decoding straight from a packed syndrome.

    The inner BCH decoder reports ``v`` errors; the overall parity ``π``
    then fixes whether the extension bit is also in error, since the
    error weight must have the parity of ``π``. The word is corrected
    iff that total is at most ``t``.
    """
    if syn == 0:
        return DecodeOutcome(OutcomeTag.CORRECTED)
    parity = (syn >> (spec.t * spec.field.degree)) & 1
    inner = syn & spec._inner_mask
    if inner:
        degrees = spec._locate(inner)
        if degrees is None:
            return _FAILURE
    else:
        degrees = []
    extension = (parity - len(degrees)) & 1
    if len(degrees) + extension > spec.t:
        return _FAILURE
    positions = []
    for d in degrees:
        pos = spec._position_of_degree[d]
        if pos < 0:
            return _FAILURE
        positions.append(pos)
    if extension:
        positions.append(spec.n - 1)
    return DecodeOutcome(OutcomeTag.CORRECTED, positions)

def bdd_decode(spec: ComponentCodeSpec, r: BitsLike) -> DecodeOutcome:
    """Bounded-distance decode an ``n_c``-bit received word.

    Returns the error pattern of the unique codeword within distance ``t``
    of ``r`` (whether or not it is the transmitted one), or a failure.
    ``r`` itself is never modified.

    :raises ValueError: if ``r`` is not ``n_c`` bits long.
    """
    return decode_syndrome(spec, syndrome(spec, r))

def is_codeword(spec: ComponentCodeSpec, r: BitsLike) -> bool:
    return syndrome(spec, r) == 0
