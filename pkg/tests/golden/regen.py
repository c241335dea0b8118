"""Regenerate the golden outputs from jobs.json.

    python3 tests/golden/regen.py
"""

import contextlib
import io
import json
import os
import sys
from pathlib import Path

from cohochschild.cli import main

HERE = Path(__file__).resolve().parent


def load_jobs() -> dict:
    return json.loads((HERE / "jobs.json").read_text())


@contextlib.contextmanager
def _cwd(path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def render(argv) -> tuple[int, str]:
    argv = [a.replace("{golden}", "golden") for a in argv]
    out, err = io.StringIO(), io.StringIO()
    with _cwd(HERE.parent), contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, f"exit {code}\n{out.getvalue()}"


def regenerate() -> None:
    for name, argv in load_jobs().items():
        _, text = render(argv)
        (HERE / f"{name}.out").write_text(text, encoding="utf-8")


if __name__ == "__main__":
    regenerate()
    sys.exit(0)
