import pytest
from fec.staircase import build_field, FieldTable
from fec.staircase.gf import (
    DEFAULT_PRIMITIVE_POLYS, gf2_polymul, gf2_polymod
)

class TestFieldTable:
    """Log/antilog arithmetic of GF(2^m)."""

    @pytest.mark.parametrize('degree', sorted(DEFAULT_PRIMITIVE_POLYS))
    def test_tables_are_inverse(self, degree):
        field = build_field(degree)
        assert field.order == (1 << degree) - 1
        assert field.log[0] == -1
        assert sorted(field.exp[:field.order]) == list(range(1, 1 << degree))
        for a in range(1, 1 << degree):
            assert field.exp[field.log[a]] == a

    def test_multiplication_matches_polynomial_product(self):
        field = build_field(6)
        for a in range(64):
            for b in range(0, 64, 7):
                expected = gf2_polymod(gf2_polymul(a, b), field.primitive_poly)
                assert field.mul(a, b) == expected

    def test_inverse_and_division(self):
        field = build_field(8)
        for a in range(1, 256):
            assert field.mul(a, field.inv(a)) == 1
            assert field.div(field.mul(a, 0x53), 0x53) == a
        assert field.div(0, 7) == 0
        with pytest.raises(ZeroDivisionError):
            field.div(5, 0)

    def test_pow_and_alpha(self):
        field = build_field(5)
        assert field.pow(0, 0) == 1
        assert field.pow(0, 3) == 0
        assert field.alpha(field.order) == 1
        assert field.alpha(-1) == field.inv(2)
        for a in range(1, 32):
            assert field.pow(a, 3) == field.mul(a, field.mul(a, a))

    @pytest.mark.parametrize('degree', [4, 7, 10])
    def test_solve_quadratic(self, degree):
        field = build_field(degree)
        solvable = 0
        for c in range(1 << degree):
            u = field.solve_quadratic(c)
            if u is None:
                continue
            solvable += 1
            assert field.mul(u, u) ^ u == c
            assert field.mul(u ^ 1, u ^ 1) ^ u ^ 1 == c
        assert solvable == 1 << (degree - 1)

    def test_minimal_polynomials(self):
        field = build_field(4)
        assert field.minimal_polynomial(1) == field.primitive_poly
        assert field.minimal_polynomial(3) == 0b11111
        assert field.minimal_polynomial(5) == 0b111
        assert field.cyclotomic_coset(3) == [3, 6, 12, 9]

    def test_rejects_bad_polynomials(self):
        with pytest.raises(ValueError, match='not primitive'):
            FieldTable(4, 0b11111)  # irreducible, but x has order 5
        with pytest.raises(ValueError, match='degree'):
            FieldTable(5, 0b10011)
        with pytest.raises(ValueError):
            build_field(3)
        with pytest.raises(ValueError):
            build_field(11)

    def test_build_field_is_cached(self):
        assert build_field(8) is build_field(8, 0b100011101)

class TestPolynomials:
    """Carry-less polynomial helpers."""

    def test_polymul(self):
        assert gf2_polymul(0b11, 0b11) == 0b101
        assert gf2_polymul(0b1011, 1) == 0b1011
        assert gf2_polymul(0, 0b111) == 0

    def test_polymod(self):
        assert gf2_polymod(0b10000, 0b10011) == 0b0011
        assert gf2_polymod(0b101, 0b11) == 0
