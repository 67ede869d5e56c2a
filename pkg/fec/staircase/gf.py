from __future__ import annotations
from typing import Optional, Tuple, List
from functools import lru_cache
from .logger import logger

#: Conventional primitive polynomials (bit ``i`` is the coefficient of x^i).
DEFAULT_PRIMITIVE_POLYS = {
    4: 0b10011,         # x^4 + x + 1
    5: 0b100101,        # x^5 + x^2 + 1
    6: 0b1000011,       # x^6 + x + 1
    7: 0b10001001,      # x^7 + x^3 + 1
    8: 0b100011101,     # x^8 + x^4 + x^3 + x^2 + 1
    9: 0b1000010001,    # x^9 + x^4 + 1
    10: 0b10000001001,  # x^10 + x^3 + 1
}

MIN_DEGREE = 4
MAX_DEGREE = 10

class FieldTable:
    """Log/antilog tables of GF(2^m) generated by a primitive element ``α``.

    Elements are plain :class:`int` bit vectors; addition is ``^``.
    Instances are read-only once built and may be shared between threads.

    :param int degree: The extension degree ``m``.
    :param int primitive_poly:
        Bitmask of the field polynomial. Must have degree ``m``
        and be primitive.

    :raises ValueError: if the degree is outside 4..10.
    :raises ValueError:
        if the polynomial does not have degree ``m`` or is not primitive
        (the multiplicative order of ``x`` is below ``2^m - 1``).

    .. attribute:: degree
        :type: int
    .. attribute:: primitive_poly
        :type: int
    .. attribute:: order
        :type: int

        Size of the multiplicative group, ``2^m - 1``.
    .. attribute:: exp
        :type: tuple[int, ...]

        Antilog table, ``exp[i] = α^i``. Doubled in length so that sums of
        two logs never need reducing.
    .. attribute:: log
        :type: tuple[int, ...]

        Log table, ``log[α^i] = i``. ``log[0]`` is ``-1``.
    """
    degree: int
    primitive_poly: int
    order: int
    exp: Tuple[int, ...]
    log: Tuple[int, ...]

    def __init__(self, degree: int, primitive_poly: int):
        if not MIN_DEGREE <= degree <= MAX_DEGREE:
            raise ValueError(
                f'Field degree must be in {MIN_DEGREE}..{MAX_DEGREE}, '
                f'got {degree}')
        if primitive_poly.bit_length() != degree + 1:
            raise ValueError(
                f'Polynomial {primitive_poly:#x} does not have degree {degree}')
        self.degree = degree
        self.primitive_poly = primitive_poly
        self.order = (1 << degree) - 1
        exp = [0] * (2 * self.order)
        log = [-1] * (1 << degree)
        a = 1
        for i in range(self.order):
            if i and a == 1:
                raise ValueError(
                    f'Polynomial {primitive_poly:#x} is not primitive: '
                    f'x has order {i} < {self.order}')
            exp[i] = a
            log[a] = i
            a <<= 1
            if a >> degree:
                a ^= primitive_poly
        if a != 1:
            # only reachable for reducible polynomials with x^order != 1
            raise ValueError(
                f'Polynomial {primitive_poly:#x} is not primitive')
        for i in range(self.order, 2 * self.order):
            exp[i] = exp[i - self.order]
        self.exp = tuple(exp)
        self.log = tuple(log)
        self._quadratic = self._quadratic_roots()
        logger.debug('Built GF(2^%d) with polynomial %#x', degree, primitive_poly)

    def __repr__(self):
        return f'FieldTable(degree={self.degree}, primitive_poly={self.primitive_poly:#x})'

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self.exp[self.log[a] + self.log[b]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError('division by zero in GF(2^m)')
        if a == 0:
            return 0
        return self.exp[(self.log[a] - self.log[b]) % self.order]

    def inv(self, a: int) -> int:
        return self.div(1, a)

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            return 0 if n else 1
        return self.exp[(self.log[a] * n) % self.order]

    def alpha(self, n: int) -> int:
        """``α^n`` for any integer ``n``."""
        return self.exp[n % self.order]

    def _quadratic_roots(self) -> Tuple[int, ...]:
        # u^2 + u = c has two roots u, u^1 or none; keep the even one
        roots = [-1] * (1 << self.degree)
        for u in range(0, 1 << self.degree, 2):
            roots[self.mul(u, u) ^ u] = u
        return tuple(roots)

    def solve_quadratic(self, c: int) -> Optional[int]:
        """A root ``u`` of ``u^2 + u = c``, or :const:`None`.
        The other root is ``u ^ 1``."""
        u = self._quadratic[c]
        return None if u < 0 else u

    def cyclotomic_coset(self, s: int) -> List[int]:
        coset = []
        e = s % self.order
        while e not in coset:
            coset.append(e)
            e = (2 * e) % self.order
        return coset

    def minimal_polynomial(self, s: int) -> int:
        """Minimal polynomial of ``α^s`` over GF(2), as a bitmask."""
        poly = [1]  # coefficients in GF(2^m), lowest degree first
        for e in self.cyclotomic_coset(s):
            root = self.exp[e]
            shifted = [0] + poly
            for i, c in enumerate(poly):
                shifted[i] ^= self.mul(c, root)
            poly = shifted
        mask = 0
        for i, c in enumerate(poly):
            if c not in (0, 1):
                raise ArithmeticError(
                    f'minimal polynomial of α^{s} has a coefficient outside GF(2)')
            mask |= c << i
        return mask

def build_field(degree: int, primitive_poly: Optional[int] = None) -> FieldTable:
    """Build (or fetch from cache) the :class:`FieldTable` of GF(2^m).

    :param int degree: ``m``, between 4 and 10.
    :param primitive_poly:
        Field polynomial bitmask; defaults to :data:`DEFAULT_PRIMITIVE_POLYS`.
    :type primitive_poly: Optional[int]
    """
    if primitive_poly is None:
        if degree not in DEFAULT_PRIMITIVE_POLYS:
            raise ValueError(
                f'Field degree must be in {MIN_DEGREE}..{MAX_DEGREE}, '
                f'got {degree}')
        primitive_poly = DEFAULT_PRIMITIVE_POLYS[degree]
    return _cached_field(degree, primitive_poly)

@lru_cache(maxsize=None)
def _cached_field(degree: int, primitive_poly: int) -> FieldTable:
    return FieldTable(degree, primitive_poly)

def gf2_polymul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomial bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out

def gf2_polymod(a: int, m: int) -> int:
    """Remainder of GF(2) polynomial ``a`` divided by ``m``."""
    mlen = m.bit_length()
    while a.bit_length() >= mlen:
        a ^= m << (a.bit_length() - mlen)
    return a
