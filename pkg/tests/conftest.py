import math

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from visbound.geometry import MoebiusIsometry, UhpPoint
from visbound.homology import SimplicialComplex

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

coord = st.floats(-5, 5, allow_nan=False)
height = st.floats(0.05, 20, allow_nan=False)
points = st.builds(UhpPoint, coord, height)


@st.composite
def isometries(draw, lo=-3.0, hi=3.0):
    """Random SL(2, R) elements, built from a, b, c with d solved for."""
    a = draw(st.floats(0.3, hi, allow_nan=False)) * draw(st.sampled_from([-1, 1]))
    b = draw(st.floats(lo, hi, allow_nan=False))
    c = draw(st.floats(lo, hi, allow_nan=False))
    return MoebiusIsometry.normalized(a, b, c, (1 + b * c) / a)


def _klein_bottle():
    # 3x3 grid: top/bottom glued straight, left/right glued with a flip
    def vert(i, j):
        if j >= 3:
            return ((-i) % 3) * 3 + (j - 3)
        return (i % 3) * 3 + j

    tris = []
    for i in range(3):
        for j in range(3):
            a, b = vert(i, j), vert(i + 1, j)
            c, d = vert(i, j + 1), vert(i + 1, j + 1)
            tris += [(a, b, d), (a, c, d)]
    return tris


GOLDEN = {
    "point": [[0]],
    "circle": [[0, 1], [1, 2], [0, 2]],
    "sphere": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
    "torus": [sorted({i, (i + 1) % 7, (i + 3) % 7}) for i in range(7)]
             + [sorted({i, (i + 2) % 7, (i + 3) % 7}) for i in range(7)],
    "rp2": [[1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 6, 2],
            [2, 3, 5], [3, 4, 6], [4, 5, 2], [5, 6, 3], [6, 2, 4]],
    "klein": _klein_bottle(),
}

# (betti_Q, torsion per degree, betti mod 2)
GOLDEN_HOMOLOGY = {
    "point": ([1], [()], [1]),
    "circle": ([1, 1], [(), ()], [1, 1]),
    "sphere": ([1, 0, 1], [(), (), ()], [1, 0, 1]),
    "torus": ([1, 2, 1], [(), (), ()], [1, 2, 1]),
    "rp2": ([1, 0, 0], [(), (2,), ()], [1, 1, 1]),
    "klein": ([1, 1, 0], [(), (2,), ()], [1, 2, 1]),
}


@pytest.fixture(params=sorted(GOLDEN))
def golden(request):
    return request.param, SimplicialComplex(GOLDEN[request.param])
