from setuptools import Extension, setup

# The compiled kernels are optional: if Cython (or a C compiler) is missing,
# the package installs without them and falls back to the numpy kernels at
# import time.
try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("coalition_var._kernels", ["src/coalition_var/_kernels.pyx"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
