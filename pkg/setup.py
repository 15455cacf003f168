"""Build script: compiles the optional Cython kernel extension.

The extension accelerates the d=1 and d=2 exponential-multiply kernels used
in the integrator hot loop.  If compilation is unavailable the install
proceeds and the package falls back to the pure-numpy kernels at import.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build extensions, degrading to pure Python on any failure."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, cython missing, ...
            print(f"warning: skipping compiled kernels ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: failed to build {ext.name} ({exc}); "
                  "falling back to numpy kernels", file=sys.stderr)


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    return cythonize(
        [Extension(
            "lohe._kernels_cy",
            ["src/lohe/_kernels_cy.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )],
        language_level="3",
    )


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
