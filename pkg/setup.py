"""Build script for the optional compiled permanent kernel.

The package works without the extension (a pure-Python Ryser fallback is
selected at import time); building it just makes large permanents fast:

    pip install -e . --no-build-isolation
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "focktrace._ryser",
                ["src/focktrace/_ryser.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
