from __future__ import annotations

import numpy as np
import pytest

from noncompactness.core import SpaceTag
from noncompactness.families import Domain, FunctionFamily

TAGS = ("l1", "l2", "linf")


def random_family(
    rng: np.random.Generator,
    max_domain: int = 8,
    max_funcs: int = 6,
    max_dim: int = 4,
    tag: str | None = None,
) -> FunctionFamily:
    """Seeded random family on a half-integer value grid (exact arithmetic in l1/linf)."""
    n_pts = int(rng.integers(2, max_domain + 1))
    n_funcs = int(rng.integers(1, max_funcs + 1))
    dim = int(rng.integers(1, max_dim + 1))
    tag = tag if tag is not None else TAGS[int(rng.integers(0, 3))]
    space = SpaceTag(dim, tag)
    domain = Domain(tuple(f"p{i}" for i in range(n_pts)))
    values = rng.integers(-4, 5, size=(n_funcs, n_pts, dim)) / 2.0
    names = tuple(f"f{i}" for i in range(n_funcs))
    return FunctionFamily(domain, space, names, values)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
