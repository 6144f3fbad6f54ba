import json

import numpy as np
import pytest

from conftest import random_family
from noncompactness.ck import GridDomain
from noncompactness.errors import InputError
from noncompactness.family_io import (
    family_to_dict,
    load_family_dict,
    load_family_file,
    save_family_file,
)
from noncompactness.generators import gen_l1_basis


BASIC = {
    "version": 1,
    "space": {"dim": 2, "norm": "l1"},
    "domain": [{"id": "a"}, {"id": "b"}],
    "functions": {"f": [[0, 0], [1, 0]], "g": [[0, 1], [0, 0]]},
}


class TestLoad:
    def test_basic(self):
        loaded = load_family_dict(BASIC)
        assert loaded.family.names == ("f", "g")
        assert len(loaded.family.domain) == 2
        assert loaded.phi_pool is None and loaded.ck is None

    def test_pools(self):
        doc = dict(BASIC)
        doc["pools"] = {
            "gamma_centers": [[0.5, 0.5]],
            "phi_pool": ["f", {"name": "h", "values": [[1, 1], [1, 1]]}],
        }
        loaded = load_family_dict(doc)
        assert loaded.gamma_centers.shape == (1, 2)
        assert loaded.phi_pool.names == ("f", "h")

    def test_grid_block(self):
        doc = {
            "version": 1,
            "space": {"dim": 1, "norm": "linf"},
            "grid": {"start": 0.0, "step": 0.25, "count": 5, "order": 1},
            "functions": {"f": [[0.0], [0.25], [0.5], [0.75], [1.0]]},
        }
        loaded = load_family_dict(doc)
        assert loaded.ck is not None and loaded.ck.order == 1
        assert np.allclose(loaded.ck.levels[1].values[0], 1.0, atol=1e-9)

    def test_coords_and_metric(self):
        doc = {
            "version": 1,
            "space": {"dim": 1, "norm": "l1"},
            "metric": "l2",
            "domain": [{"id": "a", "coords": [0.0]}, {"id": "b", "coords": [1.0]}],
            "functions": {"f": [[0], [2]]},
        }
        loaded = load_family_dict(doc)
        assert loaded.family.domain.metric == "l2"

    @pytest.mark.parametrize(
        "mutate,needle",
        [
            (lambda d: d.pop("space"), "space"),
            (lambda d: d["space"].update(norm="sup"), "space.norm"),
            (lambda d: d.update(domain=[]), "domain"),
            (lambda d: d.update(functions={}), "functions"),
            (lambda d: d["functions"].update(f=[[0, 0]]), "functions.f"),
            (lambda d: d["functions"].update(f=[[0], [1]]), "functions.f"),
            (lambda d: d.update(version=99), "version"),
            (lambda d: d.update(domain=[{"id": "a"}, {"id": "a"}]), "domain"),
        ],
    )
    def test_schema_violations_name_the_path(self, mutate, needle):
        doc = json.loads(json.dumps(BASIC))
        mutate(doc)
        with pytest.raises(InputError, match=needle.replace(".", r"\.")):
            load_family_dict(doc)

    def test_parse_error_carries_line(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{\n  "space": }\n')
        with pytest.raises(InputError, match=r":2:"):
            load_family_file(path)

    def test_unknown_pool_reference(self):
        doc = json.loads(json.dumps(BASIC))
        doc["pools"] = {"phi_pool": ["nope"]}
        with pytest.raises(InputError, match="phi_pool"):
            load_family_dict(doc)


class TestRoundTrip:
    def test_random_families(self, rng, tmp_path):
        for i in range(10):
            fam = random_family(rng)
            path = tmp_path / f"fam{i}.json"
            save_family_file(path, fam)
            loaded = load_family_file(path)
            assert loaded.family.names == fam.names
            assert loaded.family.domain.labels == fam.domain.labels
            assert np.array_equal(loaded.family.values, fam.values)
            assert loaded.family.space == fam.space

    def test_pools_roundtrip(self, tmp_path):
        ex = gen_l1_basis(3)
        path = tmp_path / "l1.json"
        save_family_file(path, ex.family, phi_pool=ex.pools["g"], gamma_centers=ex.pools["midpoints"])
        loaded = load_family_file(path)
        assert loaded.phi_pool.names == ("g",)
        assert np.array_equal(loaded.phi_pool.values, ex.pools["g"].values)
        assert np.array_equal(loaded.gamma_centers, ex.pools["midpoints"])

    def test_grid_roundtrip(self, tmp_path):
        grid = GridDomain(0.0, 0.25, 9, ((0, 3), (5, 8)))
        doc = {
            "version": 1,
            "space": {"dim": 1, "norm": "linf"},
            "grid": {"start": 0.0, "step": 0.25, "count": 9, "order": 1,
                     "segments": [[0, 3], [5, 8]]},
            "functions": {"f": [[float(i)] for i in range(8)]},
        }
        loaded = load_family_dict(doc)
        out = family_to_dict(loaded.family, grid=grid, order=1)
        reloaded = load_family_dict(out)
        assert reloaded.grid.segments == grid.segments
        assert np.array_equal(reloaded.family.values, loaded.family.values)
