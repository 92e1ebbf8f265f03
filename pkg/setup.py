"""Build script: compiles the optional Gibbs sweep extension.

The package works without the extension (a pure-Python kernel with
identical sampling semantics is selected at import time), so a failing
compiler or missing Cython only costs speed, never correctness.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("KOSLINKER_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "koslinker.sampler._gibbs_cy",
                    ["src/koslinker/sampler/_gibbs_cy.pyx"],
                    include_dirs=[np.get_include()],
                    # -ffp-contract=off: no FMA fusion, so the C arithmetic
                    # rounds exactly like the pure-Python kernel's
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
