"""Build the optional Cython kernels.

The compiled module is optional: when Cython or a compiler is missing the
package installs without it and ``predtrace.kernels`` falls back to numpy.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("PREDTRACE_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "predtrace._kernels",
                    ["src/predtrace/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    # contraction into FMA would break bitwise parity with numpy
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
