'''
Staircase codes with marked-bit window decoding, and a Monte Carlo BER
simulator to measure them.

A staircase code chains ``w x w`` blocks so that every row of
``[B_(i-1)^T B_i]`` is a codeword of an extended BCH component code.
Hard-decision window decoding runs iterative bounded-distance decoding
(BDD) over the ``L`` most recent blocks. The marked-bit decoder also uses
reliability information from the channel for the newest block only: bits
with a large LLR magnitude are *highly reliable* (HRB) and may not be
flipped by BDD, and the least reliable bits (HUB) are flipped to rescue
codewords BDD could not decode or miscorrected.

Example Usage
~~~~~~~~~~~~~

.. code-block:: python

    import numpy as np
    from fec import staircase

    code = staircase.build_code(8, t=2)  # the (256,239,2) extended BCH code
    encoder = staircase.StaircaseEncoder(code)
    rng = np.random.default_rng(1)
    block = encoder.encode(rng.integers(0, 2, encoder.info_shape))

    sweep = staircase.SweepConfig(
        code, snrs=[7.0, 7.25],
        # compare modes on identical channel noise
        modes=['standard', 'marked'],
        # stop each point after 100 bit errors or 10^8 bits
        min_errors=100, max_bits=10 ** 8,
        seed=2024, workers=4)
    for point in staircase.run_sweep(sweep):
        print(point.mode.value, point.snr_db, point.ber,
              staircase.confidence_interval(point))

Or from the command line:

.. code-block:: sh

    fec-staircase --snr-db 7.0:0.25:7.5 --mode standard --mode marked --seed 2024

Notes
~~~~~

* Bit indices, rows and columns count from 0. Pair ``i`` of a window
  couples its blocks ``i-1`` and ``i``.
* An LLR is ``log P(b=1|y) - log P(b=0|y)``: positive values decide 1.
* Results are reproducible from the base seed alone, whatever the number
  of worker processes.
'''
from __future__ import annotations
from .simples import (
    StaircaseWarning, DecoderMode, OutcomeTag, Verdict, CountingConvention
)
from .gf import FieldTable, build_field
from .bch import (
    ComponentCodeSpec, DecodeOutcome, build_code, bch_encode, bdd_decode,
    decode_syndrome, syndrome, is_codeword
)
from .frame import (
    Block, CodewordAddress, StaircaseEncoder, encode_block, serialize_bits,
    deserialize_bits, code_rate, shorten_spec
)
from .channel import (
    ChannelConfig, MarkPlane, pam_constellation, map_symbols, transmit,
    compute_llrs, hd_demap, mark_bits, uncoded_ber
)
from .window import (
    DecoderConfig, DecodingWindow, md_check, bit_flip_recover,
    decode_codeword_enhanced, genie_mcf_decode, genie_lb_decode,
    run_iteration, decode_window, slide
)
from .montecarlo import (
    SimPoint, SweepConfig, run_point, run_sweep, confidence_interval
)

__all__ = [
    'StaircaseWarning',
    'DecoderMode',
    'OutcomeTag',
    'Verdict',
    'CountingConvention',
    'FieldTable',
    'build_field',
    'ComponentCodeSpec',
    'DecodeOutcome',
    'build_code',
    'bch_encode',
    'bdd_decode',
    'decode_syndrome',
    'syndrome',
    'is_codeword',
    'Block',
    'CodewordAddress',
    'StaircaseEncoder',
    'encode_block',
    'serialize_bits',
    'deserialize_bits',
    'code_rate',
    'shorten_spec',
    'ChannelConfig',
    'MarkPlane',
    'pam_constellation',
    'map_symbols',
    'transmit',
    'compute_llrs',
    'hd_demap',
    'mark_bits',
    'uncoded_ber',
    'DecoderConfig',
    'DecodingWindow',
    'md_check',
    'bit_flip_recover',
    'decode_codeword_enhanced',
    'genie_mcf_decode',
    'genie_lb_decode',
    'run_iteration',
    'decode_window',
    'slide',
    'SimPoint',
    'SweepConfig',
    'run_point',
    'run_sweep',
    'confidence_interval',
]

__version__ = '0.1.0'
