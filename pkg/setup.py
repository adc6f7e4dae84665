from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension("xhail_lite._bitcover", ["src/xhail_lite/_bitcover.pyx"]),
]

setup(
    ext_modules=cythonize(extensions, language_level=3) if cythonize else [],
)
