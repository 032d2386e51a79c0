import os

import numpy as np
from setuptools import setup

ext_modules = []
if os.environ.get("HODGESOLVE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("hodgesolve._kernels", ["src/hodgesolve/_kernels.pyx"],
                       include_dirs=[np.get_include()], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        # no Cython: the package falls back to the pure-Python sweeps
        ext_modules = []

setup(ext_modules=ext_modules)
