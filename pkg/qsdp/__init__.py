# qsdp package initializer

# Unified package logger. Reports go to stdout, so console logs use stderr.
import sys
import logging

__version__ = "0.1.0"

LOGGER_NAME = "qsdp"
logger = logging.getLogger(LOGGER_NAME)
if not logger.handlers:
    _h = logging.StreamHandler(sys.stderr)
    _h.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    logger.addHandler(_h)
    logger.setLevel(logging.INFO)
    logger.propagate = False

# cvxopt prints an iteration table on every solve unless told otherwise;
# per-call options override this when show_progress is requested.
try:
    from cvxopt import solvers as _cvx_solvers

    _cvx_solvers.options["show_progress"] = False
except Exception:
    pass
