import numpy as np
import pytest
from hypothesis import strategies as st

from coarsemetric import families
from coarsemetric.expand import GrowthFunction, amplify
from coarsemetric.space import DiscreteSpace, build_exhaustion


@pytest.fixture(scope="session")
def halfline():
    space = families.build("halfline:200:0.5")
    exh = families.standard_exhaustion("halfline:200:0.5", space, 20)
    return space, exh


@pytest.fixture(scope="session")
def halfline_bundle(halfline):
    space, exh = halfline
    return amplify(space, exh, GrowthFunction.parse("poly2"))


@st.composite
def planar_nets(draw, min_points=4, max_points=25, min_depth=1, max_depth=6):
    """Random distinct planar points with a random ball exhaustion about one of them."""
    n = draw(st.integers(min_points, max_points))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0, 10, size=(n, 2))
    space = DiscreteSpace(tuple(f"q{i}" for i in range(n)), coords=coords)
    center = int(rng.integers(n))
    d = np.sort(np.unique(space.dist([center], range(n))[0]))
    depth = draw(st.integers(min_depth, min(max_depth, len(d))))
    cut = sorted(rng.choice(len(d) - 1, size=depth - 1, replace=False).tolist()) if depth > 1 else []
    radii = [float(d[i]) for i in cut] + [float(d[-1])]
    return space, build_exhaustion(space, radii, center)
