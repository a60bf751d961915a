"""Selection between the compiled extension kernels and the numpy fallback.

The compiled module is optional: it is built when a C compiler is available
at install time, and silently skipped otherwise.  Set DPLHEAT_BACKEND to
"python" or "compiled" to force a choice (the latter raises if the extension
is missing rather than degrade silently).
"""

import os

from . import _kernels_py as _python

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

HAVE_COMPILED = _compiled is not None

_forced = os.environ.get("DPLHEAT_BACKEND", "").strip().lower()
if _forced in ("", "auto"):
    _active = _compiled if HAVE_COMPILED else _python
elif _forced == "python":
    _active = _python
elif _forced == "compiled":
    if not HAVE_COMPILED:
        raise ImportError(
            "DPLHEAT_BACKEND=compiled but the compiled kernels are not built"
        )
    _active = _compiled
else:
    raise ImportError(f"unknown DPLHEAT_BACKEND value {_forced!r}")


def get_backend(name="active"):
    """Return a kernel module: "active", "python", or "compiled"."""
    if name == "active":
        return _active
    if name == "python":
        return _python
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def backend_name() -> str:
    return "compiled" if _active is _compiled else "python"


def available_backends():
    return ("python", "compiled") if HAVE_COMPILED else ("python",)
