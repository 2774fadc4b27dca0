import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "horizonpi._cd_fast",
                ["src/horizonpi/_cd_fast.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: install pure-Python only, the import-time backend
    # selection falls back to horizonpi._cd_py
    extensions = []

setup(ext_modules=extensions)
