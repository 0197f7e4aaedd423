"""Smoke test for the bendext_py extension module.

Builds the module with cargo, copies the shared library next to a
temporary import path and exercises every exported function. Runs under
pytest or as a plain script.
"""

import importlib
import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

S_SHAPE = {
    "boundary": [
        {"x": str(x), "y": str(y)}
        for x, y in [(0, 0), (5, 0), (5, 3), (1, 3), (1, 4), (5, 4), (5, 5), (0, 5), (0, 2), (4, 2), (4, 1), (0, 1)]
    ],
    "vertex_corners": list(range(12)),
    "chords": [[0, 6]],
}


def load_module():
    if "bendext_py" in sys.modules:
        return sys.modules["bendext_py"]
    subprocess.run(
        ["cargo", "build", "--release", "-p", "bendext-python", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libbendext_py.so"
    dest = Path(tempfile.mkdtemp(prefix="bendext_py_"))
    shutil.copy(built, dest / "bendext_py.so")
    sys.path.insert(0, str(dest))
    return importlib.import_module("bendext_py")


def test_generate_solve_verify():
    m = load_module()
    inst = m.generate("STAR", 12, 9, 7)
    assert inst == m.generate("star", 12, 9, 7)
    doc = json.loads(m.solve(inst))
    assert doc["verdict"] == "yes"
    assert len(doc["chords"]) == 9
    assert all(len(c["path"]) <= 3 for c in doc["chords"])
    report = json.loads(m.verify(inst, json.dumps(doc)))
    assert report["ok"] is True
    assert m.solution_svg(inst).startswith("<svg")


def test_no_instance_and_oracle():
    m = load_module()
    inst = json.dumps(S_SHAPE)
    doc = json.loads(m.solve(inst))
    assert doc["verdict"] == "no"
    assert doc["witness"]["kind"] == "empty_visibility"
    assert m.oracle(inst, 50) is None
    square = m.generate("CONVEX", 4, 1, 0)
    found = json.loads(m.oracle(square, 8))
    assert len(found["chords"]) == 1


def test_errors():
    m = load_module()
    for call in [
        lambda: m.solve('{"boundary": ['),
        lambda: m.generate("CONVEX", 8, 6, 1),
        lambda: m.generate("HEXAGON", 8, 2, 1),
        lambda: m.oracle(m.generate("CONVEX", 6, 2, 1), 20, 3),
    ]:
        try:
            call()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
    print("python smoke test passed")
