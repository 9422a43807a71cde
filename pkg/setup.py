import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernels are optional: nlsflow.kernels falls back to numpy.
ext_modules = []
if not os.environ.get("NLSFLOW_NO_EXTENSION"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "nlsflow._kernels",
                    ["src/nlsflow/_kernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
