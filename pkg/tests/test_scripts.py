import subprocess
import sys
from pathlib import Path

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def _run(*args):
    return subprocess.run([sys.executable, *map(str, args)], capture_output=True, text=True, timeout=600)


def test_verify_examples_sweep():
    out = _run(SCRIPTS / "verify_examples.py", "--samples", "500", "--mc-samples", "5000")
    assert out.returncode == 0, out.stdout + out.stderr
    assert out.stdout.count("(total)") == 5


def test_export_figures(tmp_path):
    out = _run(SCRIPTS / "export_figures.py", "--out", tmp_path)
    assert out.returncode == 0, out.stderr
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["karshon3_polytope.svg", "karshon3_trace1.json", "regular5_surfaces.obj"]
