"""Build script for the optional compiled fault-propagation kernel.

The package is pure Python plus one Cython extension that accelerates the
stabilizer shot loop.  The extension is optional: if Cython or a C compiler
is unavailable the build falls back to the pure-numpy kernel, which gives
identical results for the same seed.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible, warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: compiled fault kernel unavailable (%s); "
            "falling back to the pure-numpy kernel" % exc,
            file=sys.stderr,
        )


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython not found; skipping compiled kernel", file=sys.stderr)
        return []
    ext = Extension(
        "mirrorbench._fault_cy",
        sources=["src/mirrorbench/_fault_cy.pyx"],
    )
    return cythonize([ext], language_level="3")


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
