"""Build script for the optional compiled evaluation kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile only costs speed, not functionality.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the kernel if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"warning: skipping compiled kernel ({exc}); "
                  "tbcgen will use the pure-Python evaluator")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "tbcgen will use the pure-Python evaluator")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    # No -ffast-math: the kernel relies on IEEE inf/NaN propagation.
    ext = Extension(
        "tbcgen._kernel_c",
        sources=["src/tbcgen/_kernel_c.pyx"],
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
