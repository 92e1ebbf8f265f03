"""Sweep kernel backend selection.

The compiled extension is preferred when importable; otherwise the
pure-Python twin takes over with identical sampling semantics (verified by
the cross-backend tests). ``KOSLINKER_SAMPLER=python|cython`` forces a
choice, which the benchmark uses to compare the two.
"""

from __future__ import annotations

import os

from .rng import RNG_ALGORITHM, SplitMix64

__all__ = ["sweep_once", "BACKEND", "RNG_ALGORITHM", "SplitMix64", "available_backends"]

_forced = os.environ.get("KOSLINKER_SAMPLER")

if _forced == "python":
    from . import _gibbs_py as _impl
elif _forced == "cython":
    from . import _gibbs_cy as _impl  # type: ignore[attr-defined]
else:
    try:
        from . import _gibbs_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _gibbs_py as _impl

sweep_once = _impl.sweep_once
BACKEND = _impl.BACKEND_NAME


def available_backends() -> list[str]:
    names = []
    try:
        from . import _gibbs_cy  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names
