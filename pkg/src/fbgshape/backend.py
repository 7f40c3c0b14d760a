"""Kernel backend selection.

Prefers the compiled Cython kernels, falling back to the numpy versions when
the extension is not built.  Override with FBGSHAPE_BACKEND=python|cython
(cython raises if the extension is missing).
"""
import os


def _load():
    choice = os.environ.get("FBGSHAPE_BACKEND", "auto").lower()
    if choice not in ("auto", "python", "cython"):
        raise ValueError(f"FBGSHAPE_BACKEND must be auto, python or cython, got {choice!r}")
    if choice in ("auto", "cython"):
        try:
            from fbgshape import _kernels_cy

            return _kernels_cy, "cython"
        except ImportError:
            if choice == "cython":
                raise
    from fbgshape import _kernels_py

    return _kernels_py, "python"


kernels, BACKEND = _load()
