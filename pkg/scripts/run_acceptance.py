"""Print the acceptance matrix (one line per criterion) and exit non-zero on any failure."""
import pathlib
import runpy
import sys

sys.argv = [sys.argv[0]]
runpy.run_path(str(pathlib.Path(__file__).resolve().parents[1] / "tests" / "test_acceptance.py"), run_name="__main__")
