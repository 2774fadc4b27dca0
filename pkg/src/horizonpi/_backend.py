"""Import-time selection of the coordinate descent kernel.

Prefers the compiled extension; falls back to the pure-numpy kernel when
the extension is not built. Set ``HORIZONPI_PURE_PYTHON=1`` to force the
fallback (used by the backend-comparison benchmark and tests).
"""

import os

if os.environ.get("HORIZONPI_PURE_PYTHON"):
    from ._cd_py import lasso_cd

    BACKEND = "python"
else:
    try:
        from ._cd_fast import lasso_cd  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from ._cd_py import lasso_cd  # type: ignore[no-redef]

        BACKEND = "python"


def backend_name() -> str:
    """Name of the active coordinate descent backend."""
    return BACKEND


__all__ = ["lasso_cd", "backend_name", "BACKEND"]
