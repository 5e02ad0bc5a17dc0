"""Builds the _tpca extension by delegating to the repository's CMake build."""
import os
import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        try:
            import pybind11
            pybind11_dir = pybind11.get_cmake_dir()
        except ImportError:
            pybind11_dir = ""

        configure = [
            "cmake",
            "-S", str(source_dir),
            "-B", str(build_dir),
            "-DSKBUILD=ON",
            "-DCMAKE_BUILD_TYPE=Release",
            f"-DPython3_EXECUTABLE={sys.executable}",
        ]
        if pybind11_dir:
            configure.append(f"-Dpybind11_DIR={pybind11_dir}")
        subprocess.check_call(configure)
        subprocess.check_call(
            ["cmake", "--build", str(build_dir), "--target", "_tpca",
             "-j", str(os.cpu_count() or 1)])

        built = sorted(build_dir.glob("_tpca*.so")) or sorted(
            build_dir.glob("**/_tpca*"))
        if not built:
            raise RuntimeError("CMake did not produce the _tpca module")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built[0], dest)


setup(
    ext_modules=[CMakeExtension("tpca._tpca")],
    cmdclass={"build_ext": CMakeBuild},
)
