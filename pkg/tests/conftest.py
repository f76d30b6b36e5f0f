import json
from pathlib import Path

import numpy as np
import pytest

GOLDEN = json.loads((Path(__file__).parent / "golden" / "quality.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


@pytest.fixture(scope="session")
def camera_pair():
    """Natural 64x64 frame pair: block-averaged camera image and a 1-pixel pan."""
    data = pytest.importorskip("skimage.data")
    cam = data.camera().astype(float).reshape(64, 8, 64, 8).mean(axis=(1, 3))
    f0 = np.floor(cam)
    return f0, np.roll(f0, 1, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
