"""Builds the optional compiled enumeration kernel.

The package works without the extension (a pure-Python fallback is selected at
import time); building it just makes exhaustive certification faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "wsrobust._kernels._enum_cy",
                ["src/wsrobust/_kernels/_enum_cy.pyx"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
