"""Build script for the optional compiled stepping kernel.

The package is fully functional without the extension; tmnet.engine falls
back to the pure-Python kernel when the compiled one is absent.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


class optional_build_ext(build_ext):
    """Build the extension if possible, otherwise install without it."""

    def run(self):
        try:
            build_ext.run(self)
        except Exception as exc:  # compiler missing or broken
            print(f"warning: skipping compiled kernel ({exc})")

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except Exception as exc:
            print(f"warning: could not compile {ext.name} ({exc})")


extensions = [
    Extension("tmnet.engine._kernel", ["src/tmnet/engine/_kernel.pyx"]),
]

if cythonize is not None:
    ext_modules = cythonize(
        extensions, compiler_directives={"language_level": "3"}
    )
else:
    print("warning: Cython not available, installing without compiled kernel")
    ext_modules = []

setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
