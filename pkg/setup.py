"""Build hook for the optional compiled sieve kernel.

If Cython or a C compiler is unavailable the package still installs and the
pure-Python sieve is used instead.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("EXPLICIT_MORDELL_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "explicit_mordell._sieve_kernel",
                ["src/explicit_mordell/_sieve_kernel.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
