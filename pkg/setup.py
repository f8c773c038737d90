import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "acgraph._sweep",
                ["src/acgraph/_sweep.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The extension is optional: acgraph.kernels falls back to the pure-Python
# sweep if the compiled module is absent.
setup(ext_modules=ext_modules)
