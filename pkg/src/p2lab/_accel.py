"""Numba switch.

Every hot kernel in :mod:`p2lab.kernels` exists twice: a ``*_nb`` loop
compiled with numba and a ``*_np`` vectorised numpy version.  The public
name is bound to one of them at import time.  Set ``P2LAB_NO_NUMBA=1`` to
force the numpy path (numba is then never compiled).
"""
import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

_flag = os.environ.get("P2LAB_NO_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag not in ("1", "true", "yes", "on")


def njit(fn=None, **kwargs):
    # compilation is lazy, so decorating costs nothing when the numpy path is selected
    if not HAVE_NUMBA:
        return fn if fn is not None else (lambda f: f)
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if fn is not None:
        return numba.njit(**kwargs)(fn)
    return numba.njit(**kwargs)


def pick(nb_impl, np_impl):
    return nb_impl if USE_NUMBA else np_impl


def backend():
    return "numba" if USE_NUMBA else "numpy"
