"""Build script.

The compiled elimination kernel is optional: if Cython or a C compiler is
missing the package installs with the pure-Python eliminator only.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "operaq._elim_cy",
                ["src/operaq/_elim_cy.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    import sys

    print(f"operaq: building without compiled kernel ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
