import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off keeps the compiled SMO loop bit-identical to the
# pure-numpy fallback (no fused multiply-add reassociation).
setup(
    ext_modules=cythonize(
        [
            Extension(
                "sasvfuse.backends._smo",
                ["src/sasvfuse/backends/_smo.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
)
