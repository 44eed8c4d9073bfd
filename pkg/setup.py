import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the numpy
# implementation in telefilter.kernels._purekin when the extension is absent.
ext_modules = []
if os.environ.get("TELEFILTER_SKIP_EXT") != "1":
    from Cython.Build import cythonize

    ext = Extension(
        "telefilter.kernels._fastkin",
        sources=["src/telefilter/kernels/_fastkin.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    ext_modules = cythonize([ext], language_level="3")

setup(ext_modules=ext_modules)
