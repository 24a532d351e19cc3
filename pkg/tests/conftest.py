import math
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from flatklein.atlas import FigureConfig, build_atlas


def config_for(n: int, r: float = 1.0) -> FigureConfig:
    """Smallest round strip height that clears the crease for ``n`` sides."""
    tau = 1.0 / math.tan(math.pi / n)
    s = 2.0 * r if n == 3 else float(math.floor(2.0 * tau * r) + 1)
    return FigureConfig(n=n, r=r, s=s)


@pytest.fixture(scope="session")
def atlas3():
    return build_atlas(FigureConfig(n=3, r=1.0, s=2.0))


@pytest.fixture(scope="session", params=[3, 4, 5, 6])
def atlas_n(request):
    return build_atlas(config_for(request.param))
