"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (the numpy kernels in
``orliczmax._kernels.pure`` are the import-time fallback), so the extension is
marked optional and any build failure degrades to the pure backend.
"""

from setuptools import Extension, setup

extensions = []
try:
    import numpy as np
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "orliczmax._kernels._core",
                ["src/orliczmax/_kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
