"""Kernel backend selection.

The compiled extension (hashvault._core) and the pure-Python module
(hashvault._pure) expose the same functions with the same semantics.  We
pick one at import time: the extension if it built, else the fallback.
Set HASHVAULT_BACKEND=py or HASHVAULT_BACKEND=c to force a choice; forcing
c when the extension is missing is an error rather than a silent downgrade.
"""

from __future__ import annotations

import os

from . import _pure


def _select():
    forced = os.environ.get("HASHVAULT_BACKEND", "").strip().lower()
    if forced not in ("", "py", "c"):
        raise ImportError(f"HASHVAULT_BACKEND must be 'py' or 'c', not {forced!r}")
    if forced == "py":
        return _pure
    try:
        from . import _core
    except ImportError:
        if forced == "c":
            raise ImportError(
                "HASHVAULT_BACKEND=c but the compiled extension is not available"
            ) from None
        return _pure
    return _core


kernels = _select()

BACKEND = kernels.NAME


def available_backends() -> tuple[str, ...]:
    """Names of the backends importable right now."""
    names = ["py"]
    try:
        from . import _core  # noqa: F401
        names.append("c")
    except ImportError:
        pass
    return tuple(names)


def load_backend(name: str):
    """Fetch a backend module by name regardless of what was selected."""
    if name == "py":
        return _pure
    if name == "c":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r}")
