"""Build script: compiles the optional Cython sweep kernels.

The package works without the extension (a pure-Python backend is selected
at import time), so any failure here degrades to a source-only install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "lnnplay.lnn.kernels._fast",
                ["src/lnnplay/lnn/kernels/_fast.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
