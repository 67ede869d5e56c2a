"""Command-line front end: ``fec-staircase`` / ``python -m fec.staircase``."""
from __future__ import annotations
from typing import Optional, List, Sequence
from datetime import datetime, timezone
import argparse
import csv
import json
import logging
import math
import sys
from . import __version__
from .logger import logger
from .simples import CountingConvention, DecoderMode
from .bch import ComponentCodeSpec
from .channel import SUPPORTED_ORDERS, MAX_QUANT_BITS
from .montecarlo import SimPoint, SweepConfig, confidence_interval, run_sweep

#: Bumped whenever the CSV columns change.
CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ('snr_db', 'mode', 'code', 'modulation', 'bits', 'bit_errors',
               'ber', 'ci_low', 'ci_high', 'blocks', 'miscorrections_logged',
               'seconds')
FORMATS = ('csv', 'json')

# SweepConfig fields whose validation errors are reported against a flag
_FLAGS = {
    'order': '--mod',
    'modes': '--mode',
    'snrs': '--snr-db',
    'min_errors': '--min-errors',
    'max_bits': '--max-bits',
    'stream_blocks': '--stream-blocks',
    'workers': '--workers',
}

class RunManifest:
    """A finished run: the resolved configuration plus its results.
    Rerunning :attr:`config` reproduces :attr:`points` exactly (apart
    from timings).

    .. attribute:: config
        :type: SweepConfig
    .. attribute:: points
        :type: list[SimPoint]
    .. attribute:: version
        :type: str
    .. attribute:: timestamp
        :type: str

        ISO 8601, UTC.
    """
    config: SweepConfig
    points: List[SimPoint]
    version: str
    timestamp: str

    def __init__(self, config, points=(), version: str = __version__,
                 timestamp: Optional[str] = None):
        self.config = SweepConfig.from_data(config)
        self.points = [SimPoint.from_data(p) for p in points]
        self.version = version
        if timestamp is None:
            timestamp = datetime.now(timezone.utc).isoformat(timespec='seconds')
        self.timestamp = timestamp

    def __repr__(self):
        return ('RunManifest(config={0.config!r}, points={1}, '
                'version={0.version!r}, timestamp={0.timestamp!r})').format(
                    self, len(self.points))

    def __eq__(self, other):
        if not isinstance(other, RunManifest):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def to_dict(self):
        return {
            'version': self.version,
            'timestamp': self.timestamp,
            'config': self.config.to_dict(),
            'points': [p.to_dict() for p in self.points],
        }

    @classmethod
    def from_data(cls, data) -> RunManifest:
        if isinstance(data, cls):
            return data
        return cls(data['config'], data.get('points', ()),
                   data.get('version', __version__), data.get('timestamp'))

    @classmethod
    def load(cls, path: str) -> RunManifest:
        with open(path, 'r') as f:
            return cls.from_data(json.load(f))

def _number(value: float) -> str:
    return '{:.17g}'.format(value)

def csv_row(point: SimPoint) -> List[str]:
    if point.bits:
        low, high = map(_number, confidence_interval(point))
    else:
        low = high = ''
    return [_number(point.snr_db), point.mode.value, point.code,
            str(point.modulation), str(point.bits), str(point.bit_errors),
            _number(point.ber), low, high, str(point.blocks),
            str(point.miscorrections), _number(point.seconds)]

def _write(manifest: RunManifest, fmt: str, f):
    if fmt == 'json':
        json.dump(manifest.to_dict(), f, indent=2)
        f.write('\n')
        return
    f.write(f'# fec-staircase {manifest.version} results, '
            f'schema {CSV_SCHEMA_VERSION}\n')
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(CSV_COLUMNS)
    for point in manifest.points:
        writer.writerow(csv_row(point))

def emit_results(manifest: RunManifest, fmt: str = 'csv',
                 path: Optional[str] = None):
    """Write results as CSV (one row per point) or as the JSON manifest.

    :param str fmt: ``csv`` or ``json``.
    :param path: Output file; standard output when :const:`None` or ``-``.
    :raises ValueError: on an unknown format.
    :raises OSError: if the file cannot be written.
    """
    if fmt not in FORMATS:
        raise ValueError(f'Output format must be one of {FORMATS}, got {fmt!r}')
    if path is None or path == '-':
        _write(manifest, fmt, sys.stdout)
        return
    with open(path, 'w', newline='') as f:
        _write(manifest, fmt, f)
    logger.info('Wrote %d points to %s', len(manifest.points), path)

def _bounded_int(low: int, high: Optional[int] = None):
    def convert(text: str) -> int:
        try:
            value = int(text, 10 if text.isdigit() else 0)
        except ValueError:
            try:
                number = float(text)
            except ValueError:
                number = math.nan
            if not number.is_integer():
                raise argparse.ArgumentTypeError(f'invalid integer {text!r}')
            value = int(number)
        if value < low or (high is not None and value > high):
            bound = f'{low}..{high}' if high is not None else f'>= {low}'
            raise argparse.ArgumentTypeError(f'{value} is not in {bound}')
        return value
    convert.__name__ = 'int'
    return convert

def _delta(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid number {text!r}')
    if not value > 0:
        raise argparse.ArgumentTypeError(f'delta must be positive, got {text}')
    return value

def _quant_bits(text: str) -> Optional[int]:
    if text.lower() in ('none', 'exact'):
        return None
    return _bounded_int(1, MAX_QUANT_BITS)(text)

def _code(text: str) -> dict:
    try:
        parts = [int(p) for p in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f'expected N,K,T[,S], got {text!r}')
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(f'expected N,K,T[,S], got {text!r}')
    n, k, t = parts[:3]
    s = parts[3] if len(parts) == 4 else 0
    return {'n_mother': n, 'k_mother': k, 't': t, 'shortening': s}

def expand_snrs(texts: Sequence[str]) -> List[float]:
    """Expand ``6,6.5`` style lists and inclusive ``start:step:stop``
    ranges.

    :raises ValueError: on malformed input or a non-positive step.
    """
    values = []
    for text in texts:
        for item in filter(None, text.split(',')):
            if ':' not in item:
                values.append(float(item))
                continue
            try:
                start, step, stop = map(float, item.split(':'))
            except ValueError:
                raise ValueError(f'expected START:STEP:STOP, got {item!r}')
            if not step > 0 or stop < start:
                raise ValueError(f'empty or unbounded range {item!r}')
            points = int(math.floor((stop - start) / step + 1e-9)) + 1
            values.extend(round(start + i * step, 10) for i in range(points))
    return values

def _snrs(text: str) -> List[float]:
    try:
        return expand_snrs([text])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fec-staircase',
        description='Monte Carlo BER simulation of staircase codes with '
        'standard, Smith-style and marked-bit window decoding.')
    parser.add_argument('--version', action='version',
                        version=f'%(prog)s {__version__}')
    code = parser.add_argument_group('code and channel')
    code.add_argument('--code', type=_code, default=_code('256,239,2'),
                      metavar='N,K,T[,S]',
                      help='extended BCH mother code and shortening '
                      '(default 256,239,2)')
    code.add_argument('--poly', type=_bounded_int(2), default=None,
                      help='primitive polynomial as an integer, e.g. 0x11d')
    code.add_argument('--mod', type=int, choices=SUPPORTED_ORDERS, default=2,
                      help='PAM order (default 2)')
    code.add_argument('--snr-db', type=_snrs, action='append', metavar='SNRS',
                      help='comma-separated SNRs in dB and/or inclusive '
                      'START:STEP:STOP ranges; may be repeated')
    dec = parser.add_argument_group('decoder')
    dec.add_argument('--mode', action='append',
                     choices=[m.value for m in DecoderMode],
                     help='decoder mode; repeat to compare modes on the same '
                     'noise (default marked)')
    dec.add_argument('--delta', type=_delta, default=10.0,
                     help='HRB threshold on |LLR| (default 10; inf disables HRBs)')
    dec.add_argument('--window', type=_bounded_int(3), default=9,
                     help='window size L in blocks (default 9)')
    dec.add_argument('--iters', type=_bounded_int(1), default=7,
                     help='decoding iterations per window (default 7)')
    dec.add_argument('--quant-bits', type=_quant_bits, default=5,
                     help='reliability bits per newest-block bit, or "none" '
                     'for exact magnitudes (default 5)')
    dec.add_argument('--no-bit-flipping', dest='bit_flipping',
                     action='store_false',
                     help='marked mode: do not flip unreliable bits')
    dec.add_argument('--no-zero-syndrome-rule', dest='zero_syndrome_rule',
                     action='store_false',
                     help='do not reject flips on zero-syndrome codewords')
    sim = parser.add_argument_group('simulation')
    sim.add_argument('--seed', type=_bounded_int(0), default=None,
                     help='base seed (default: random, recorded in the output)')
    sim.add_argument('--min-errors', type=_bounded_int(1), default=500,
                     help='stop a point after this many bit errors (default 500)')
    sim.add_argument('--max-bits', type=_bounded_int(1), default=10 ** 9,
                     help='...or after this many bits (default 1e9)')
    sim.add_argument('--workers', type=_bounded_int(1), default=None,
                     help='worker processes (default 1)')
    sim.add_argument('--stream-blocks', type=_bounded_int(2), default=200,
                     help='blocks delivered per stream (default 200)')
    sim.add_argument('--count-info-bits-only', action='store_true',
                     help='count errors on information bits only')
    sim.add_argument('--manifest', metavar='FILE',
                     help='rerun the configuration of a JSON manifest; '
                     'other simulation flags are ignored except --workers')
    out = parser.add_argument_group('output')
    out.add_argument('--out', default='-', metavar='FILE',
                     help='output file (default standard output)')
    out.add_argument('--format', choices=FORMATS, default='csv',
                     help='output format (default csv)')
    out.add_argument('--no-progress', dest='progress', action='store_false',
                     help='hide the progress counter')
    verbosity = out.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true',
                           help='log per-stream details')
    verbosity.add_argument('-q', '--quiet', action='store_true',
                           help='log warnings and errors only')
    return parser

def sweep_from_args(args: argparse.Namespace) -> SweepConfig:
    """Build the :class:`SweepConfig` described by parsed arguments.

    :raises ValueError: if the values are individually valid but do not
        combine into a valid configuration.
    :raises OSError: if ``--manifest`` cannot be read.
    """
    if args.manifest:
        sweep = RunManifest.load(args.manifest).config
        changes = {'progress': args.progress}
        if args.workers is not None:
            changes['workers'] = args.workers
        return sweep.clone(**changes)
    code = dict(args.code, primitive_poly=args.poly)
    try:
        ComponentCodeSpec.from_data(code)
    except ValueError as exc:
        raise ValueError(f'--code: {exc}') from exc
    if not args.snr_db:
        raise ValueError('--snr-db is required unless --manifest is given')
    modes = args.mode or [DecoderMode.MARKED.value]
    decoder = {
        'mode': modes[0],
        'window': args.window,
        'iterations': args.iters,
        'delta': args.delta,
        'quant_bits': args.quant_bits,
        'bit_flipping': args.bit_flipping,
        'zero_syndrome_rule': args.zero_syndrome_rule,
    }
    try:
        return SweepConfig(
            code, [s for group in args.snr_db for s in group], order=args.mod,
            decoder=decoder, modes=modes, min_errors=args.min_errors,
            max_bits=args.max_bits, workers=args.workers or 1, seed=args.seed,
            stream_blocks=args.stream_blocks,
            counting=(CountingConvention.INFO_BITS if args.count_info_bits_only
                      else CountingConvention.ALL_BITS),
            progress=args.progress)
    except ValueError as exc:
        field, _, detail = str(exc).partition(': ')
        if field not in _FLAGS:
            raise
        raise ValueError(f'{_FLAGS[field]}: {detail}') from exc

def parse_args(argv: Optional[Sequence[str]] = None) -> SweepConfig:
    """Parse command-line flags into a :class:`SweepConfig`.

    Invalid values exit with status 2 and a message naming the flag.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return sweep_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))

_handler = logging.StreamHandler()
_handler.setFormatter(logging.Formatter(
    '{levelname}\t{name}\t{asctime} {message}', style='{'))

def _configure_logging(args: argparse.Namespace):
    # one handler however often main() runs in a process
    _handler.stream = sys.stderr
    if _handler not in logger.handlers:
        logger.addHandler(_handler)
    if args.verbose:
        logger.setLevel(logging.DEBUG)
    elif args.quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)

def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        sweep = sweep_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))
    except OSError as exc:
        logger.error('Cannot read manifest: %s', exc)
        return 1
    logger.info('Running %r', sweep)
    try:
        points = run_sweep(sweep)
    except ValueError as exc:
        logger.error('%s', exc)
        return 2
    manifest = RunManifest(sweep, points)
    try:
        emit_results(manifest, args.format, args.out)
    except OSError as exc:
        logger.error('Cannot write results: %s', exc)
        return 1
    return 0
