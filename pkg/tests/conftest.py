from __future__ import annotations

import numpy as np
import pytest

from lineglow import synth
from lineglow.model import Polyline, RenderParams, rasterize
from lineglow.pipeline import prepare


@pytest.fixture(scope="session")
def corridor_prep():
    """Prepared corridor fixture shared by render-level tests."""
    lines = synth.corridor(120, grid=256)
    return prepare(lines, 256, 256, kernel_n=3, bandwidth_h=1.0)


@pytest.fixture(scope="session")
def teaser_params():
    return RenderParams(mu=0.6, sigma=0.5, eta=3.0, phi=-20.0, kernel_n=3)


@pytest.fixture
def grid64():
    return 64, 64


def make_raster(vertices, line_id=0, kernel_n=3, grid=64, cluster=None):
    line = Polyline(id=line_id, vertices=np.asarray(vertices, dtype=float), cluster=cluster)
    return rasterize(line, kernel_n, grid, grid)
