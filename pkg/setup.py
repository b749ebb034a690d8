import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("QUADDYN_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext = Extension(
            "quaddyn._ckernels",
            ["src/quaddyn/_ckernels.pyx"],
            include_dirs=["src/quaddyn"],
            libraries=["gmp"],
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
        ext_modules = cythonize([ext], compiler_directives={"language_level": "3"})

setup(ext_modules=ext_modules)
