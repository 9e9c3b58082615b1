"""Build script: compiles the optional fast kernel, falls back to pure Python."""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        "src/zoomwrite/_fast.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    # -ffp-contract=off keeps double arithmetic bit-identical to CPython's,
    # which the pure/compiled parity contract relies on.
    for ext in ext_modules:
        ext.extra_compile_args = ["-O3", "-ffp-contract=off"]
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"zoomwrite: fast kernel disabled ({exc}); using pure-Python kernel\n")

setup(ext_modules=ext_modules)
