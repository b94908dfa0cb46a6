import random

import pytest

from simvec.core import (
    HslQ,
    LineElement,
    NBBox,
    NPoint,
    PolygonElement,
    RectElement,
    SimVecDoc,
    TextElement,
)
from simvec.forge import build_chart

CHART_KINDS = ("bar", "line", "area")

WORDS = ("alpha", "beta", "gamma", "delta", "epsilon", "Total Output",
         "Coal", "Gas", "Solar", "2020", "x", "Share of y")


def random_color(rng: random.Random) -> HslQ:
    return HslQ(rng.randint(0, 20), rng.randint(0, 20), rng.randint(0, 20))


def random_points(rng: random.Random, n: int) -> tuple[NPoint, ...]:
    pts = []
    prev = None
    while len(pts) < n:
        p = NPoint(rng.randint(0, 1000), rng.randint(0, 1000))
        if p != prev:
            pts.append(p)
            prev = p
    return tuple(pts)


def random_bbox(rng: random.Random) -> NBBox:
    left = rng.randint(0, 900)
    top = rng.randint(0, 900)
    return NBBox(left, top, rng.randint(0, 1000 - left), rng.randint(0, 1000 - top))


def random_element(rng: random.Random):
    kind = rng.randrange(4)
    if kind == 0:
        return TextElement(rng.choice(WORDS), random_bbox(rng), random_color(rng))
    if kind == 1:
        return RectElement(random_bbox(rng), random_color(rng))
    if kind == 2:
        return LineElement(random_points(rng, rng.randint(2, 6)), random_color(rng))
    return PolygonElement(random_points(rng, rng.randint(3, 7)), random_color(rng))


def random_doc(rng: random.Random, max_elements: int = 8) -> SimVecDoc:
    return SimVecDoc(tuple(random_element(rng)
                           for _ in range(rng.randint(0, max_elements))))


@pytest.fixture(scope="session")
def corpus300():
    """300 deterministic charts, equal chart-type mix."""
    return [build_chart(20240511, i, CHART_KINDS[i % 3]) for i in range(300)]
