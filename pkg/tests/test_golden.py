import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "golden"))
from regen import HERE, load_jobs, render  # noqa: E402

JOBS = load_jobs()


@pytest.mark.parametrize("name", sorted(JOBS))
def test_golden_output(name):
    expected = (HERE / f"{name}.out").read_text(encoding="utf-8")
    assert render(JOBS[name])[1] == expected, f"regenerate with: python3 tests/golden/regen.py ({name})"


@pytest.mark.parametrize("name", ["hh_exterior_neg", "hh_koszul_p3", "cohh_dual_koszul"])
def test_output_independent_of_jobs(name):
    one = render(JOBS[name])[1]
    assert render(JOBS[name] + ["--jobs", "4"])[1] == one
