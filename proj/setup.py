"""Builds the `_dupq` extension through the project's CMake tree.

scikit-build would normally own this glue; it is unavailable in the
supported toolchain, so a small custom build_ext drives CMake directly.
"""

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

        import pybind11

        subprocess.check_call(
            [
                "cmake",
                "-S",
                str(source_dir),
                "-B",
                str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DDUPQ_BUILD_TESTS=OFF",
                "-DDUPQ_BUILD_CLI=OFF",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
            ]
        )
        subprocess.check_call(
            ["cmake", "--build", str(build_dir), "--target", "_dupq", "--parallel"]
        )

        built = next((build_dir / "python" / "dupq").glob("_dupq.*"))
        target = Path(self.get_ext_fullpath(ext.name))
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, target)


setup(
    packages=["dupq"],
    package_dir={"dupq": "python/dupq"},
    ext_modules=[CMakeExtension("dupq._dupq")],
    cmdclass={"build_ext": CMakeBuild},
)
