# -*- coding: utf-8 -*-
"""
Exact audits of Berry-Esseen bounds from Stein's method for exchangeable
pairs, at the critical points of the Curie-Weiss and monomer-dimer models
"""
__version__ = "0.3.0"

import logging

import tqdm


class TqdmLoggingHandler(logging.Handler):
    """Console handler that writes through tqdm, so progress bars stay intact"""

    def __init__(self, level=logging.NOTSET):
        super().__init__(level)

    def emit(self, record):
        try:
            msg = self.format(record)
            tqdm.tqdm.write(msg)
            self.flush()
        except (KeyboardInterrupt, SystemExit):
            raise
        except Exception:
            self.handleError(record)


def _console_handler():
    console = TqdmLoggingHandler()
    console.setLevel(logging.INFO)
    try:
        import colorlog

        console.setFormatter(
            colorlog.ColoredFormatter("%(log_color)s%(levelname)s - %(message)s")
        )
    except ImportError:
        console.setFormatter(logging.Formatter("%(levelname)s - %(message)s"))
        print("Install colorlog for colored logging output")
    return console


logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)
logging.captureWarnings(True)
logger.addHandler(_console_handler())

from . import (  # noqa: E402
    configuration,
    curie_weiss,
    discrete_law,
    limit_law,
    metrics,
    monomer_dimer,
    oracles,
    report,
    stein_core,
    sweep,
    util,
)
