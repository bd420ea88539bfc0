import random

import pytest
from hypothesis import settings

from boxpierce.geom import Box, ProblemInstance

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


def random_boxes(rng: random.Random, n: int, d: int, span: float = 0.6, grid: int | None = None) -> list:
    out = []
    for _ in range(n):
        if grid:
            lo = [rng.randrange(grid) for _ in range(d)]
            hi = [l + rng.randrange(1, grid // 2 + 2) for l in lo]
        else:
            lo = [rng.random() for _ in range(d)]
            hi = [l + rng.random() * span for l in lo]
        out.append(Box(tuple(lo), tuple(hi)))
    return out


@pytest.fixture
def rng():
    return random.Random(12345)


def instance(boxes) -> ProblemInstance:
    return ProblemInstance(boxes[0].dim, boxes)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
