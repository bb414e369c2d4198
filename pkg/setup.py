import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ODRLKIT_PURE_PYTHON") not in ("1", "true", "yes"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("odrlkit.rdf._scanner", ["src/odrlkit/rdf/_scanner.pyx"], extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
