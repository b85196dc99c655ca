"""Build script for the optional compiled vertex-enumeration kernel.

The package works without the extension (a numpy fallback is selected at
import time), but the compiled kernel makes intensity optimization in
finite-key mode considerably faster.
"""

from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "rfiqkd._vertex_cy",
        sources=["src/rfiqkd/_vertex_cy.pyx"],
        extra_compile_args=["-O3"],
    ),
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    ),
)
