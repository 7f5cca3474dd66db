"""Builds the fixlogic_py extension by delegating to cargo.

setuptools-rust is deliberately not required: the extension is a plain
cdylib, so a `cargo build --release -p fixlogic-py` plus a copy of the
resulting shared library is all that is needed.
"""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).resolve().parent


class CargoExtension(Extension):
    def __init__(self, name: str) -> None:
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext: Extension) -> None:
        subprocess.run(
            ["cargo", "build", "--release", "-p", "fixlogic-py"],
            check=True,
            cwd=ROOT,
        )
        if sys.platform == "darwin":
            libname = "libfixlogic_py.dylib"
        elif sys.platform == "win32":
            libname = "fixlogic_py.dll"
        else:
            libname = "libfixlogic_py.so"
        built = ROOT / "target" / "release" / libname
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copy2(built, dest)


setup(
    ext_modules=[CargoExtension("fixlogic_py")],
    cmdclass={"build_ext": CargoBuildExt},
)
