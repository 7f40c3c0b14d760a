"""Build script: compiles the optional Cython kernel extension.

If Cython (or a C compiler) is unavailable the package installs pure-Python;
fbgshape.backend falls back to the numpy kernels at import time.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fbgshape._kernels_cy",
                ["src/fbgshape/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
