"""Build script.

The enumeration kernel has a compiled (Cython) implementation for speed and a
pure-Python twin with identical semantics.  The extension is optional: if the
compiler or Cython is unavailable the package installs anyway and falls back
to the pure kernel at import time.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: compiled kernel skipped ({exc}); pure fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            print(f"warning: building {ext.name} failed ({exc}); pure fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - Cython missing entirely
        return []
    return cythonize(
        [Extension("tmdyn._kernels", ["src/tmdyn/_kernels.pyx"])],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
