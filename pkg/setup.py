"""Build script: compiles the Cython kernel module when a toolchain is present.

The package works without the extension (randgeo._backend falls back to the
NumPy kernels), so a failed compile only prints a warning.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing, keep the pure build
            print(f"randgeo: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"randgeo: skipping {ext.name} ({exc})", file=sys.stderr)


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools.extension import Extension
    except ImportError as exc:
        print(f"randgeo: building without compiled kernels ({exc})", file=sys.stderr)
        return []
    return cythonize(
        [
            Extension(
                "randgeo._kernels_cy",
                ["src/randgeo/_kernels_cy.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
