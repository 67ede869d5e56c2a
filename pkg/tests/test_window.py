import math
import numpy as np
from numpy.testing import assert_array_equal
import pytest
from fec.staircase import (
    CodewordAddress, DecoderConfig, DecoderMode, DecodingWindow, DecodeOutcome,
    MarkPlane, OutcomeTag, StaircaseEncoder, Verdict, bdd_decode,
    bit_flip_recover, decode_codeword_enhanced, decode_window, decode_syndrome,
    genie_lb_decode, genie_mcf_decode, md_check, run_iteration, slide
)
from fec.staircase.window import decode_codeword

L = 4
ROW = 7

def zero_window(spec, size=L, truth=True):
    """A full window of all-zero transmitted and received blocks."""
    window = DecodingWindow(spec, size)
    zero = np.zeros((spec.w, spec.w), dtype=np.uint8)
    for _ in range(size):
        window.push(zero, None, zero if truth else None)
    window.marks = marks_with(spec.w)
    return window

def marks_with(w, levels=None, hrbs=()):
    """Marks with every level at 31 except ``levels`` ({(row, col): level})."""
    level = np.full((w, w), 31, dtype=np.uint16)
    for cell, value in (levels or {}).items():
        level[cell] = value
    hrb = np.zeros((w, w), dtype=bool)
    for cell in hrbs:
        hrb[cell] = True
    return MarkPlane(hrb, level, 10.0, 5)

def snapshot(window):
    return ([b.copy() for b in window.blocks],
            [None if s is None else s.copy() for s in window.syndromes])

def assert_same(window, snap):
    blocks, syns = snap
    for now, then in zip(window.blocks, blocks):
        assert_array_equal(now, then)
    for now, then in zip(window.syndromes, syns):
        if then is None:
            assert now is None
        else:
            assert_array_equal(now, then)

def assert_all_zero(window):
    assert not any(b.any() for b in window.blocks)
    assert not any(s.any() for s in list(window.syndromes)[1:])
    assert window.verify_syndromes()

def weight6_codeword(spec, rng, accept):
    """Support of a weight-6 codeword satisfying ``accept``.

    A weight-4 word that BDD corrects with two flips lies at distance 2
    from a weight-6 codeword: the union of both supports.
    """
    while True:
        support = rng.choice(spec.n, 4, replace=False)
        received = np.zeros(spec.n, dtype=np.uint8)
        received[support] = 1
        outcome = bdd_decode(spec, received)
        if outcome.corrected and outcome.weight == 2:
            codeword = tuple(sorted(set(support.tolist()) | set(outcome.positions)))
            if accept(codeword):
                return codeword

def newer(w, positions):
    return [k for k in positions if k >= w]

@pytest.fixture
def address():
    return CodewordAddress(L - 1, ROW)

class TestDecoderConfig:
    """Decoder settings and validation."""

    def test_defaults(self):
        config = DecoderConfig()
        assert (config.window, config.iterations, config.delta, config.quant_bits) \
            == (9, 7, 10.0, 5)
        assert config.mode == DecoderMode.MARKED
        assert config.hrb_rule and config.flips_hubs

    def test_round_trip(self):
        config = DecoderConfig('smith', window=5, delta=math.inf, quant_bits=None)
        assert DecoderConfig.from_data(config.to_dict()) == config
        assert config.clone(mode='marked').mode == DecoderMode.MARKED
        assert not config.hrb_rule

    @pytest.mark.parametrize('changes', [
        {'window': 2}, {'iterations': 0}, {'delta': 0.0}, {'delta': -1.0},
        {'quant_bits': 0}, {'quant_bits': 17}, {'mode': 'fancy'},
    ])
    def test_validation(self, changes):
        with pytest.raises(ValueError):
            DecoderConfig(**changes)

class TestDecodingWindow:
    """Window bookkeeping and the syndrome cache."""

    def test_fill_and_slide(self, code64):
        window = DecodingWindow(code64, 3)
        blocks = [np.full((32, 32), i % 2, dtype=np.uint8) for i in range(5)]
        with pytest.raises(ValueError, match='holds'):
            window.slide(blocks[0])
        for b in blocks[:3]:
            window.push(b)
        assert window.full and len(window) == 3
        with pytest.raises(ValueError, match='full'):
            window.push(blocks[3])
        delivered, same = slide(window, blocks[3])
        assert same is window
        assert_array_equal(delivered, blocks[0])
        assert window.syndromes[0] is None
        assert window.verify_syndromes()

    def test_rejects_wrong_shapes(self, code64):
        with pytest.raises(ValueError):
            DecodingWindow(code64, 2)
        with pytest.raises(ValueError, match='32x32'):
            DecodingWindow(code64, 3).push(np.zeros((16, 16)))

    def test_flip_keeps_syndromes_current(self, code64, rng):
        window = zero_window(code64, 5)
        for _ in range(200):
            window.flip(*rng.integers(0, [5, 32, 32]).tolist())
        assert window.verify_syndromes()

    def test_pushed_blocks_are_copied(self, code64):
        window = DecodingWindow(code64, 3)
        block = np.zeros((32, 32), dtype=np.uint8)
        window.push(block)
        window.flip(0, 1, 1)
        assert not block.any()

    def test_run_iteration_needs_full_window(self, code64):
        window = DecodingWindow(code64, 3)
        window.push(np.zeros((32, 32), dtype=np.uint8))
        with pytest.raises(ValueError):
            run_iteration(window, DecoderConfig(window=3))

    @pytest.mark.parametrize('mode', list(DecoderMode))
    def test_corrects_sparse_errors(self, code64, rng, mode):
        encoder = StaircaseEncoder(code64)
        sent = [encoder.last.bits] + [
            encoder.encode(rng.integers(0, 2, encoder.info_shape)).bits
            for _ in range(L - 1)]
        window = DecodingWindow(code64, L)
        for i, block in enumerate(sent):
            received = block.copy()
            if i:
                received[rng.integers(0, 32), rng.integers(0, 32)] ^= 1
            window.push(received, marks_with(32), block)
        iterations = decode_window(window, DecoderConfig(mode, window=L))
        assert iterations <= 7
        for now, block in zip(window.blocks, sent):
            assert_array_equal(now, block)
        assert window.stats['miscorrections'] == 0

class TestMiscorrectionDetection:
    """Rejecting BDD results that flip reliable or settled bits."""

    def test_zero_syndrome_crossing_codeword(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(code256, rng, lambda s: s[0] < w)
        flips, injected = codeword[:2], codeword[2:]
        window = zero_window(code256)
        window.apply(address, injected)
        assert decode_syndrome(code256, window.syndrome_of(address)).positions == flips
        assert md_check(window, address, flips) == Verdict.MISCORRECTION
        assert md_check(window, address, flips, zero_syndrome_rule=False) == Verdict.PASS
        snap = snapshot(window)
        config = DecoderConfig('smith', window=L)
        assert decode_codeword_enhanced(window, address, config) == ()
        assert_same(window, snap)
        assert window.stats['md_rejections'] == 1

    def test_standard_decoding_accepts_and_logs(self, code256, rng, address):
        codeword = weight6_codeword(code256, rng, lambda s: True)
        window = zero_window(code256)
        window.apply(address, codeword[2:])
        assert decode_codeword(window, address) == codeword[:2]
        assert window.stats['miscorrections'] == 1

    def test_highly_reliable_bit(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(code256, rng, lambda s: len(newer(w, s)) >= 2)
        flips = tuple(newer(w, codeword)[:2])
        injected = sorted(set(codeword) - set(flips))
        window = zero_window(code256)
        window.apply(address, injected)
        config = DecoderConfig('marked', window=L, bit_flipping=False)
        snap = snapshot(window)
        window.marks = marks_with(w, hrbs=[(ROW, flips[1] - w)])
        assert md_check(window, address, flips) == Verdict.MISCORRECTION
        assert md_check(window, address, flips, hrb_rule=False) == Verdict.PASS
        assert decode_codeword_enhanced(window, address, config) == ()
        assert_same(window, snap)
        window.marks = marks_with(w)
        assert decode_codeword_enhanced(window, address, config) == flips

    def test_true_corrections_pass(self, code256, address):
        w = code256.w
        window = zero_window(code256)
        window.apply(address, [5, w + 3])
        assert md_check(window, address, [5, w + 3]) == Verdict.PASS

class TestBitFlipping:
    """Recovering failures and detected miscorrections with HUBs."""

    def test_case1_recovers_three_errors(self, code256, address):
        w = code256.w
        errors = (5, w + 10, w + 20)
        window = zero_window(code256)
        window.apply(address, errors)
        window.marks = marks_with(w, {(ROW, 10): 0})
        assert not decode_syndrome(code256, window.syndrome_of(address)).corrected
        config = DecoderConfig(window=L)
        assert decode_codeword_enhanced(window, address, config) == errors
        assert_all_zero(window)
        assert window.stats['case1_accepts'] == 1
        assert window.stats['miscorrections'] == 0

    def test_case2_single_flip_miscorrection(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(
            code256, rng, lambda s: s[0] < w and len(newer(w, s)) >= 3)
        injected = codeword[1:]
        hubs = newer(w, injected)[:3]
        window = zero_window(code256)
        window.apply(address, injected)
        window.marks = marks_with(w, {(ROW, k - w): i for i, k in enumerate(hubs)})
        outcome = decode_syndrome(code256, window.syndrome_of(address))
        assert outcome == DecodeOutcome(OutcomeTag.CORRECTED, [codeword[0]])
        assert code256.d0 - outcome.weight - code256.t == 3
        assert bit_flip_recover(window, address, outcome) == injected
        assert decode_codeword_enhanced(window, address, DecoderConfig(window=L)) \
            == injected
        assert_all_zero(window)
        assert window.stats['case2_accepts'] == 1

    def test_case2_double_flip_miscorrection(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(
            code256, rng, lambda s: s[0] < w and len(newer(w, s[2:])) >= 2)
        injected = codeword[2:]
        hubs = newer(w, injected)[:2]
        window = zero_window(code256)
        window.apply(address, injected)
        window.marks = marks_with(w, {(ROW, k - w): 0 for k in hubs})
        assert decode_codeword_enhanced(window, address, DecoderConfig(window=L)) \
            == injected
        assert_all_zero(window)

    def test_rejected_recovery_leaves_window_unchanged(self, code256, address):
        w = code256.w
        window = zero_window(code256)
        window.apply(address, (5, w + 10, w + 20))
        syn = window.syndrome_of(address)
        decoy = next(c for c in range(w) if c not in (10, 20) and not
                     decode_syndrome(code256, syn ^ code256._columns[w + c]).corrected)
        window.marks = marks_with(w, {(ROW, decoy): 0})
        snap = snapshot(window)
        assert decode_codeword_enhanced(window, address, DecoderConfig(window=L)) == ()
        assert_same(window, snap)
        assert window.stats['case1_attempts'] == 1
        assert window.stats['case1_accepts'] == 0

    def test_case2_hubs_off_the_errors(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(code256, rng, lambda s: s[0] < w)
        injected = codeword[2:]
        window = zero_window(code256)
        window.apply(address, injected)
        syn = window.syndrome_of(address)
        taken = {k - w for k in codeword if k >= w}
        free = [c for c in range(w) if c not in taken]
        # two unreliable bits that are not errors: the transmitted word is out of reach
        decoys = next((a, b) for i, a in enumerate(free) for b in free[i + 1:]
                      if not decode_syndrome(code256, syn ^ code256._columns[w + a]
                                             ^ code256._columns[w + b]).corrected)
        window.marks = marks_with(w, {(ROW, c): 0 for c in decoys})
        snap = snapshot(window)
        outcome = decode_syndrome(code256, syn)
        assert outcome.weight == 2
        assert bit_flip_recover(window, address, outcome) is None
        assert decode_codeword_enhanced(window, address, DecoderConfig(window=L)) == ()
        assert_same(window, snap)
        assert window.stats['md_rejections'] == 1
        assert window.stats['case2_attempts'] == 1
        assert window.stats['case2_accepts'] == 0

    def test_case2_recovery_rejected_by_hrb(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(
            code256, rng, lambda s: s[0] < w and len(newer(w, s[2:])) >= 3)
        injected = codeword[2:]
        hubs, reliable = newer(w, injected)[:2], newer(w, injected)[2]
        window = zero_window(code256)
        window.apply(address, injected)
        window.marks = marks_with(w, {(ROW, k - w): 0 for k in hubs},
                                  hrbs=[(ROW, reliable - w)])
        snap = snapshot(window)
        # the second decoding reaches the transmitted word but flips an HRB
        assert md_check(window, address, injected) == Verdict.MISCORRECTION
        assert decode_codeword_enhanced(window, address, DecoderConfig(window=L)) == ()
        assert_same(window, snap)
        assert window.stats['md_rejections'] == 1
        assert window.stats['case2_attempts'] == 1
        assert window.stats['case2_accepts'] == 0

    def test_gives_up_without_candidates(self, code256, address):
        w = code256.w
        window = zero_window(code256)
        window.apply(address, (5, w + 10, w + 20))
        window.marks = marks_with(w, hrbs=[(ROW, c) for c in range(w)])
        snap = snapshot(window)
        outcome = decode_syndrome(code256, window.syndrome_of(address))
        assert bit_flip_recover(window, address, outcome) is None
        assert window.stats['bf_give_ups'] == 1
        assert_same(window, snap)

    def test_only_newest_pair(self, code256):
        window = zero_window(code256)
        with pytest.raises(ValueError, match='newest'):
            bit_flip_recover(window, CodewordAddress(1, 0), DecodeOutcome.failure())

class TestGenies:
    """Truth-assisted reference decoders."""

    def test_mcf_accepts_only_correctable_words(self, code256):
        w = code256.w
        window = zero_window(code256)
        two, three = CodewordAddress(2, 3), CodewordAddress(L - 1, ROW)
        window.apply(two, (1, w + 4))
        window.apply(three, (5, w + 10, w + 20))
        snap = snapshot(window)
        assert genie_mcf_decode(window, three) is None
        assert_same(window, snap)
        assert genie_mcf_decode(window, two) == (1, w + 4)
        assert window.stats['genie_rejections'] == 1

    def test_lb_flips_true_errors(self, code256, address):
        w = code256.w
        window = zero_window(code256)
        window.apply(address, (5, w + 10, w + 20))
        assert genie_lb_decode(window, address) == (5, w + 10, w + 20)
        assert_all_zero(window)

    def test_lb_fails_without_newest_block_errors(self, code256, address):
        window = zero_window(code256)
        window.apply(address, (1, 2, 3))
        assert genie_lb_decode(window, address) is None

    def test_lb_undoes_detected_miscorrection(self, code256, rng, address):
        w = code256.w
        codeword = weight6_codeword(
            code256, rng, lambda s: len(newer(w, s[2:])) >= 2)
        window = zero_window(code256)
        window.apply(address, codeword[2:])
        assert genie_lb_decode(window, address) == codeword[2:]
        assert window.stats['miscorrections'] == 0

    def test_need_truth(self, code256, address):
        window = zero_window(code256, truth=False)
        with pytest.raises(ValueError, match='transmitted'):
            genie_mcf_decode(window, address)
        with pytest.raises(ValueError, match='transmitted'):
            genie_lb_decode(window, address)
