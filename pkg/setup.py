"""Build script for the compiled filter/revert kernels.

The package works without the extension (a NumPy fallback is selected at
import time), but the compiled kernels are what make full-history scans
tolerable, so the default build includes them.
"""

from setuptools import setup
from Cython.Build import cythonize

setup(
    ext_modules=cythonize(
        ["src/editaudit/_kernels.pyx"],
        language_level=3,
    ),
)
