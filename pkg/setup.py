import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GRAPHFACTOR_PURE"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "graphfactor._ckernels",
                    ["src/graphfactor/_ckernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Pure-Python install; kernels.py falls back automatically.
        ext_modules = []

setup(ext_modules=ext_modules)
