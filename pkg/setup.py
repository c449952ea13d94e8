from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback in netdecouple._kernels_py is used at runtime.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "netdecouple._speedups",
                ["src/netdecouple/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
