from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mbtop._fastpath",
                ["src/mbtop/_fastpath.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback in mbtop.odes is used when the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
