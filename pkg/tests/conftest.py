import json
from importlib import resources

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kempfness.scenes import SphereTupleScene

settings.register_profile(
    "numeric",
    max_examples=25,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("numeric")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def sphere_example():
    """The shipped four-point configuration and its two degenerations."""
    doc = json.loads((resources.files("kempfness") / "data" / "sphere4.json").read_text())
    pts = {k: np.asarray(v, dtype=float) for k, v in doc["points"].items()}
    return SphereTupleScene(doc["m"]), pts


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance():
    """Records one PASS/FAIL line per acceptance criterion and asserts it."""

    def record(number: int, title: str, ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
