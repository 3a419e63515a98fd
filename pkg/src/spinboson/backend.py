"""Kernel selection: compiled extension if available, pure Python otherwise.

Set SPINBOSON_BACKEND=python (or =compiled) to force a choice; the default
"auto" prefers the compiled kernel.
"""

import os

from . import _purepy

_choice = os.environ.get("SPINBOSON_BACKEND", "auto").strip().lower()

if _choice in ("auto", "", "compiled", "c"):
    try:
        from . import _core as _impl
    except ImportError:
        if _choice in ("compiled", "c"):
            raise ImportError(
                "SPINBOSON_BACKEND=compiled but the extension is not built")
        _impl = _purepy
elif _choice in ("python", "pure", "purepy"):
    _impl = _purepy
else:
    raise ValueError(f"unknown SPINBOSON_BACKEND={_choice!r}")

COMPILED = bool(getattr(_impl, "COMPILED", False))
BACKEND_NAME = "compiled" if COMPILED else "python"

digamma_kernel = _impl.digamma
trigamma_kernel = _impl.trigamma
integrate_ray = _impl.integrate_ray


def available_backends():
    """Names of the kernels importable in this environment."""
    names = ["python"]
    try:
        from . import _core  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def get_kernel(name):
    """Return a kernel module by name ("compiled" or "python")."""
    if name == "python":
        return _purepy
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
