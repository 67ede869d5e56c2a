from fractions import Fraction
import numpy as np
from numpy.testing import assert_array_equal
import pytest
from fec.staircase import (
    Block, CodewordAddress, StaircaseEncoder, ComponentCodeSpec, encode_block,
    serialize_bits, deserialize_bits, code_rate, shorten_spec, build_code
)
from fec.staircase.bch import syndromes
from fec.staircase.frame import codeword_bits, pair_matrix

class TestEncodeBlock:
    """Staircase block encoding."""

    def test_every_pair_row_is_a_codeword(self, code256, rng):
        prev = Block.zeros(code256.w)
        for index in range(1, 4):
            info = rng.integers(0, 2, (code256.w, code256.w - code256.p), dtype=np.uint8)
            block = encode_block(code256, prev, info)
            assert block.index == index
            assert block.bits.shape == (128, 128)
            assert_array_equal(block.bits[:, :code256.w - code256.p], info)
            assert not syndromes(code256, pair_matrix(prev, block)).any()
            prev = block

    def test_zero_info_after_zero_block(self, code64):
        info = np.zeros((code64.w, code64.w - code64.p), dtype=np.uint8)
        assert not encode_block(code64, Block.zeros(code64.w), info).bits.any()

    def test_dimension_mismatch(self, code64):
        info = np.zeros((32, 19), dtype=np.uint8)
        with pytest.raises(ValueError, match='Previous block'):
            encode_block(code64, Block.zeros(31), info)
        with pytest.raises(ValueError, match='Information bits'):
            encode_block(code64, Block.zeros(32), info[:, :18])

    def test_no_information_bits(self):
        # (16,7,2): w = 8, p = 9
        with pytest.raises(ValueError, match='no information bits'):
            encode_block(build_code(4, 2), Block.zeros(8), np.zeros((8, 0)))

    def test_streaming_encoder(self, code64, rng):
        encoder = StaircaseEncoder(code64)
        assert encoder.info_shape == (32, 19)
        prev = encoder.last
        for _ in range(5):
            block = encoder.encode(rng.integers(0, 2, encoder.info_shape))
            assert not syndromes(code64, pair_matrix(prev, block)).any()
            prev = block
        assert encoder.last.index == 5

class TestBlock:
    """Blocks and their serialization."""

    def test_square_only(self):
        with pytest.raises(ValueError, match='square'):
            Block(np.zeros((3, 4)))

    def test_serialize_is_row_major(self):
        bits = np.arange(16).reshape(4, 4) % 3 == 0
        block = Block(bits.astype(np.uint8), index=7)
        stream = serialize_bits(block)
        assert_array_equal(stream, bits.reshape(-1))
        assert deserialize_bits(stream, 4, index=7) == block

    def test_deserialize_length(self):
        with pytest.raises(ValueError, match='16 bits'):
            deserialize_bits(np.zeros(15), 4)

    def test_copy_is_independent(self):
        block = Block.zeros(4)
        copy = block.copy()
        copy.bits[0, 0] = 1
        assert not block.bits.any()
        assert copy != block

class TestCodewordAddress:
    """Mapping between codeword bits and block cells."""

    def test_locate(self):
        address = CodewordAddress(3, 5)
        assert address.locate(8, 2) == (2, 2, 5)
        assert address.locate(8, 8) == (3, 5, 0)
        assert address.locate(8, 15) == (3, 5, 7)
        assert CodewordAddress(1, 0, 9).locate(8) == (1, 0, 1)

    def test_locate_matches_codeword_bits(self, rng):
        older, newer = rng.integers(0, 2, (2, 6, 6), dtype=np.uint8)
        window = {0: older, 1: newer}
        for row in range(6):
            bits = codeword_bits(older, newer, row)
            for k in range(12):
                b, r, c = CodewordAddress(1, row).locate(6, k)
                assert window[b][r, c] == bits[k]

    def test_of_bit_inverts_locate(self):
        w = 8
        for row in range(w):
            for k in range(2 * w):
                address = CodewordAddress(4, row, k)
                block, r, c = address.locate(w)
                assert CodewordAddress.of_bit(w, 4, block, r, c) == address

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            CodewordAddress(0, 1)
        with pytest.raises(ValueError):
            CodewordAddress(1, 1).locate(4, 8)
        with pytest.raises(ValueError):
            CodewordAddress(1, 4).locate(4, 0)
        with pytest.raises(ValueError):
            CodewordAddress.of_bit(4, 2, 3, 0, 0)

class TestRates:
    """Staircase rates and shortening."""

    def test_code_rate(self, code256):
        assert code_rate(code256) == Fraction(2 * 239, 256) - 1

    def test_shorten_spec(self):
        mother = ComponentCodeSpec.from_params(512, 493, 2)
        spec = shorten_spec(mother, 284)
        assert spec.label == '(228,209,2)'
        assert shorten_spec(spec, 0) == spec
        assert shorten_spec(shorten_spec(mother, 4), 4).label == '(504,485,2)'

    def test_shorten_spec_errors(self, code256):
        with pytest.raises(ValueError, match='odd length'):
            shorten_spec(code256, 3)
        with pytest.raises(ValueError, match='no information bits'):
            shorten_spec(code256, 239)
        with pytest.raises(ValueError):
            shorten_spec(code256, -2)
