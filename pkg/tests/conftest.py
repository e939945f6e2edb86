"""Test configuration: make the src layout importable without installing."""

import pathlib
import sys

SRC = pathlib.Path(__file__).resolve().parent.parent / "src"
try:
    import orliczmax  # noqa: F401
except ImportError:
    sys.path.insert(0, str(SRC))
