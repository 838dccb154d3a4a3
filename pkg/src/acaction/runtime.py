"""Process-wide runtime knobs.

The only knob for now is the worker count handed to the FFT-based
implicit solvers.  Defaults to 1 so repeated runs are bit-reproducible;
the CLI flag ``--threads`` or the ``AC_ACTION_THREADS`` environment
variable raise it.
"""

import os


def _threads_from_env():
    raw = os.environ.get("AC_ACTION_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


_threads = _threads_from_env()


def set_threads(n):
    global _threads
    _threads = max(1, int(n))


def get_threads():
    return _threads
