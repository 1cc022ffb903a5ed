import os
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
        extdir = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp).resolve()
        build_dir.mkdir(parents=True, exist_ok=True)

        cfg = "Debug" if self.debug else "Release"
        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            f"-DRSO2STAT_PYTHON_OUTPUT_DIR={extdir}",
            "-DRSO2STAT_BUILD_TESTS=OFF",
            "-DRSO2STAT_BUILD_PYTHON=ON",
        ]
        source_dir = Path(__file__).resolve().parent
        subprocess.run(["cmake", str(source_dir), *cmake_args], cwd=build_dir, check=True)
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "-j", str(os.cpu_count() or 2)],
            cwd=build_dir,
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("rso2stat._core")],
    cmdclass={"build_ext": CMakeBuild},
)
