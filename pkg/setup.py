"""Build script for the optional Cython kernel extension.

The package works without the extension: ``qphonon.kernels`` falls back to
the numpy implementation when ``qphonon._ckernels`` cannot be imported.
"""
import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("QPHONON_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        extensions = cythonize(
            [
                Extension(
                    "qphonon._ckernels",
                    ["src/qphonon/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )

setup(ext_modules=extensions)
