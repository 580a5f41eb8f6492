import pytest

from amronet.engine import SimConfig
from amronet.geometry import Point2, Rect, WorldMap
from amronet.scenario import ScenarioSpec, TriangularStrategy


def ard_spec(size=32.0, bases=((0.5, 0.5),), agents=1, seed=0, strategy="global",
             obstacles=(), **cfg):
    cfg.setdefault("max_steps", 400_000)
    return ScenarioSpec(
        world=WorldMap(Rect(0.0, 0.0, size, size), tuple(obstacles)),
        base_stations=tuple(Point2(*b) for b in bases),
        agents_per_base_station=agents,
        strategy=TriangularStrategy(strategy),
        config=SimConfig(seed=seed, **cfg),
        seeds=(seed,),
    )


@pytest.fixture
def make_ard():
    return ard_spec


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
