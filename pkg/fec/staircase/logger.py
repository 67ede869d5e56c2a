import logging

logger = logging.getLogger('fec.staircase')
logger.setLevel(logging.INFO)

del logging
