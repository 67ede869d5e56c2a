import logging
import numpy as np
from fec import staircase

# (256,239,2): extended BCH over GF(2^8), w = 128, 17 parity bits per row
code = staircase.build_code(8, t=2)
print(code, 'rate', float(staircase.code_rate(code)))

# A few blocks of the staircase, starting from the all-zero block
encoder = staircase.StaircaseEncoder(code)
rng = np.random.default_rng(0)
blocks = [encoder.encode(rng.integers(0, 2, encoder.info_shape)) for _ in range(3)]
print('first block weight', int(blocks[0].bits.sum()))

# Through the channel: 4-PAM at 14 dB, with marks for the marked decoder
channel = staircase.ChannelConfig(order=4, snr_db=14.0, seed=1)
y = staircase.transmit(
    staircase.map_symbols(staircase.serialize_bits(blocks[0]), channel),
    channel, channel.rng())
llrs = staircase.compute_llrs(y, channel)
marks = staircase.mark_bits(llrs, delta=10.0, q=5).reshape(code.w, code.w)
print('channel bit errors', int((staircase.hd_demap(y, channel)
                                 != staircase.serialize_bits(blocks[0])).sum()),
      'HRBs', int(marks.hrb.sum()))

# show package logs
logger = logging.getLogger('fec.staircase')
logger.setLevel(logging.INFO)
logger.addHandler(logging.StreamHandler())
logger.handlers[0].setFormatter(logging.Formatter(
    '{levelname}\t{name}\t{asctime} {message}', style='{'))

# A small sweep: standard against marked decoding on the same noise
sweep = staircase.SweepConfig(
    code, snrs=[7.0, 7.2], modes=['standard', 'marked'],
    min_errors=50, max_bits=2 * 10 ** 7, seed=2024)
for point in staircase.run_sweep(sweep):
    low, high = staircase.confidence_interval(point)
    print(f'{point.mode.value:>8} {point.snr_db:5.2f} dB  '
          f'BER {point.ber:.3e}  [{low:.3e}, {high:.3e}]')
