"""Picks the compiled kernels when they import, the numpy fallback otherwise.

``DIMSPEC_BACKEND=python`` forces the fallback.
"""

import os
from contextlib import contextmanager

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_active = _compiled if _compiled is not None else _fallback
if os.environ.get("DIMSPEC_BACKEND", "").lower() == "python":
    _active = _fallback


def kernels():
    return _active


def available():
    return ["compiled", "python"] if _compiled is not None else ["python"]


def set_backend(name):
    global _active
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        _active = _compiled
    elif name == "python":
        _active = _fallback
    else:
        raise ValueError(f"unknown backend {name!r}")


@contextmanager
def using(name):
    global _active
    saved = _active
    set_backend(name)
    try:
        yield
    finally:
        _active = saved
