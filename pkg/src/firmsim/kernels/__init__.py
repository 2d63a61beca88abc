"""Backend selection for the hot interaction-walk kernel.

The compiled Cython kernel is preferred when built; the pure-Python fallback
is always available. Both produce bit-identical results. Selection happens at
import time and can be forced with FIRMSIM_BACKEND={python,compiled} or at
runtime via set_backend (mainly for tests and benchmarks).
"""

from __future__ import annotations

import os

from . import _walk_py

_BACKENDS = {"python": _walk_py.interaction_walk}

try:
    from . import _walk_cy

    _BACKENDS["compiled"] = _walk_cy.interaction_walk
except ImportError:
    _walk_cy = None

_env = os.environ.get("FIRMSIM_BACKEND", "").strip().lower()
if _env and _env not in _BACKENDS:
    raise ImportError(
        f"FIRMSIM_BACKEND={_env!r} not available; choices: {sorted(_BACKENDS)}"
    )
ACTIVE_BACKEND = _env if _env else ("compiled" if "compiled" in _BACKENDS else "python")

interaction_walk = _BACKENDS[ACTIVE_BACKEND]


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def get_walk(name: str):
    return _BACKENDS[name]


def set_backend(name: str) -> None:
    global interaction_walk, ACTIVE_BACKEND
    interaction_walk = _BACKENDS[name]
    ACTIVE_BACKEND = name
