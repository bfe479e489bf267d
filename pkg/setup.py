"""Build hook: compile the optional Cython kernel, falling back to pure NumPy.

The package is fully functional without the extension; gl2local.kernels picks
whichever implementation imported successfully. Set GL2LOCAL_NO_EXT=1 to skip
the compile step deliberately (used by the benchmark harness to force the
fallback path).
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("GL2LOCAL_NO_EXT"):
    try:
        from Cython.Build import cythonize
        import numpy

        ext_modules = cythonize(
            ["src/gl2local/kernels/_ckernels.pyx"],
            language_level="3",
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
            ext.define_macros.append(("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION"))
    except Exception as exc:  # pragma: no cover - build environment dependent
        print(f"gl2local: skipping Cython extension ({exc}); pure fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
