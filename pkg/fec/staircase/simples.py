from enum import Enum, IntEnum

class StaircaseWarning(UserWarning):
    """:mod:`fec.staircase`-specific warning type."""

class DecoderMode(Enum):
    """Staircase decoding strategies. The values are the spellings accepted
    by the command line.

    .. attribute:: STANDARD

        Iterative BDD that always accepts the component decoder's result.
    .. attribute:: SMITH

        Rejects newest-pair decodings that flip a bit of a zero-syndrome
        codeword in the previous pair.
    .. attribute:: MARKED

        Marked-bit decoding: miscorrection detection with highly reliable
        bits plus bit flipping of highly unreliable bits.
    .. attribute:: GENIE_MCF

        Miscorrection-free reference: a component decoding is only accepted
        when the received word holds at most ``t`` errors.
    .. attribute:: GENIE_LB

        Idealized marked-bit decoder (perfect miscorrection detection and
        perfect bit flipping in the newest block).
    """
    STANDARD = 'standard'
    SMITH = 'smith'
    MARKED = 'marked'
    GENIE_MCF = 'genie-mcf'
    GENIE_LB = 'genie-lb'

class OutcomeTag(IntEnum):
    """Observable result of bounded-distance decoding.

    .. attribute:: CORRECTED

        The received word lies within distance ``t`` of a codeword. This
        covers correct decoding and miscorrection alike.
    .. attribute:: FAILURE

        No codeword within distance ``t``; the word is left untouched.
    """
    CORRECTED = 1
    FAILURE = 2

class Verdict(IntEnum):
    """Result of miscorrection detection.

    .. attribute:: PASS
    .. attribute:: MISCORRECTION
    """
    PASS = 0
    MISCORRECTION = 1

class CountingConvention(Enum):
    """Which bits of a delivered block enter the bit error rate.

    .. attribute:: ALL_BITS

        All ``w*w`` bits (information and parity).
    .. attribute:: INFO_BITS

        Only the ``w*(w-p)`` information bits.
    """
    ALL_BITS = 'all'
    INFO_BITS = 'info'
