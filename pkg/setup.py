"""Build script: compiles the Cython stepping kernel when possible.

The package works without the extension (a pure-Python stepper is selected
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/shootbvp/_dopri5.pyx"],
        language_level=3,
        compiler_directives={"boundscheck": False, "wraparound": False, "cdivision": True},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
