"""Kernel backend selection.

The compiled Cython kernel is preferred; if the extension is missing
(e.g. source checkout without a build step) the numpy reference kernel is
used instead.  Both expose the same ``run_lti`` contract.
"""

from __future__ import annotations

try:
    from gridloop._kernels import run_lti  # noqa: F401
    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on build environment
    from gridloop._kernels_py import run_lti  # noqa: F401
    BACKEND = "numpy"


def backend_name() -> str:
    """Name of the stepping kernel in use ('cython' or 'numpy')."""
    return BACKEND
