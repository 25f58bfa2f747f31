import os
import platform
import sys

from setuptools import Extension, setup

# -fno-math-errno lets gcc vectorize the libm calls in _cbrt.c through libmvec.
# Override with JVMD_CFLAGS, e.g. JVMD_CFLAGS="-O2" for a portable build.
_default_cflags = "-O3 -march=native -fno-math-errno"
if platform.machine() in ("x86_64", "AMD64"):
    _default_cflags += " -mprefer-vector-width=512"
CFLAGS = os.environ.get("JVMD_CFLAGS", _default_cflags).split()
LIBS = ["mvec", "m"] if sys.platform.startswith("linux") else []

ext_modules = []
if os.environ.get("JVMD_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "jvmd._kernels",
                    ["src/jvmd/_kernels.pyx", "src/jvmd/_cbrt.c"],
                    include_dirs=["src/jvmd"],
                    extra_compile_args=CFLAGS,
                    libraries=LIBS,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
