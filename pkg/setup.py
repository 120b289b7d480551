"""Build the optional compiled jet core; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("ZEROCOUNT_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("zerocount._jetcore", ["src/zerocount/_jetcore.pyx"],
                       include_dirs=[np.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       libraries=["m"],
                       # error-free transforms must not be fused into FMAs
                       extra_compile_args=["-ffp-contract=off"])],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
