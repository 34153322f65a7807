from Cython.Build import cythonize
from setuptools import Extension, setup

setup(
    ext_modules=cythonize(
        [Extension("sumstar._kernels._accel", ["src/sumstar/_kernels/_accel.pyx"])],
        compiler_directives={"language_level": "3"},
    ),
)
