"""Build script: compiles the chain-search kernel when Cython is available.

The package works without the extension (the pure-Python kernel is selected
at import time), so any failure here degrades to a source-only install.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "threatgraph._kernel.chain_cy",
                ["src/threatgraph/_kernel/chain_cy.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
