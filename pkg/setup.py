import platform

import numpy as np
from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off: the kernels promise one rounding per multiply and per
# add, so mul+add must not be fused into FMA (the pure-python backend never
# fuses). AVX2 only vectorizes across independent output elements, which
# leaves the per-element reduction order intact.
compile_args = ["-O3", "-ffp-contract=off"]
if platform.machine() in ("x86_64", "AMD64"):
    compile_args.insert(1, "-march=x86-64-v3")

ext = Extension(
    "mldnn._kernels",
    ["src/mldnn/_kernels.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=compile_args,
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(
    ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}),
)
