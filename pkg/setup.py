"""Build script for the optional compiled feature-extraction kernel.

The package is fully functional without the extension; phantom.features
falls back to the pure-Python implementation when the import fails.
"""
import sys

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
    print("phantom: Cython not available, building without the compiled kernel",
          file=sys.stderr)
else:
    ext_modules = cythonize(
        [Extension("phantom.features._kernel",
                   ["src/phantom/features/_kernel.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
