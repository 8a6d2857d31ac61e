"""CMake-driven build of the phaselab extension module.

The compiled core lives in CMakeLists.txt; this shim builds the `_core`
target and drops the resulting module inside the `phaselab` package.
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

        out_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        out_path.parent.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "--parallel"],
            check=True,
        )

        built = sorted(build_dir.glob("_core.*.so")) + sorted(build_dir.glob("_core.so"))
        if not built:
            raise RuntimeError(f"no _core module produced under {build_dir}")
        shutil.copy2(built[0], out_path)


setup(
    ext_modules=[CMakeExtension("phaselab._core")],
    cmdclass={"build_ext": CMakeBuild},
)
