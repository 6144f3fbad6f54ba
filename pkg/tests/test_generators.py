import numpy as np
import pytest

from oracles import brute_minimax_partition, brute_omega, brute_omega_ext
from noncompactness.core import distance_matrix
from noncompactness.errors import InputError
from noncompactness.families import family_image, sup_distance_matrix
from noncompactness.generators import (
    GENERATORS,
    check_example,
    evaluate_quantity,
    gen_c01_ramp_spikes,
    gen_identity_ball,
    gen_interval_spikes_ck,
    gen_l1_basis,
    gen_lindenstrauss_bumps,
    gen_ramp_family,
    gen_spike_linf,
)


def assert_table_passes(ex):
    rows = check_example(ex)
    failing = [r for r in rows if not r["passed"]]
    assert not failing, failing


class TestSpike:
    @pytest.mark.parametrize("K,N", [(2, 2), (3, 2), (3, 3), (4, 2), (5, 3)])
    def test_expected_table(self, K, N):
        assert_table_passes(gen_spike_linf(K, N))

    def test_smallest_scale_fully_brute_forced(self):
        ex = gen_spike_linf(2, 2)
        fam = ex.family
        dist = sup_distance_matrix(fam)
        assert brute_minimax_partition(dist, 1) == 1.0
        for n in range(1, 6):
            assert brute_omega(fam.values, "linf", n) == (1.0 if n <= 4 else 0.0)
        assert brute_omega_ext(fam.values, fam.values, "linf", 1, 2) == 0.0

    def test_invalid_scale(self):
        with pytest.raises(InputError):
            gen_spike_linf(1, 2)


class TestIdentityBall:
    def test_expected_table_d2(self):
        ex = gen_identity_ball(2)
        assert ex.scale["samples"] == 8
        assert_table_passes(ex)

    def test_sigma_alpha_exactly_two(self):
        ex = gen_identity_ball(2)
        assert evaluate_quantity(ex, "sigma_alpha", {"k": 1}) == 2.0

    def test_densified_sampling_keeps_targets(self):
        ex = gen_identity_ball(3, samples=20, seed=5)
        assert_table_passes(ex)

    def test_invalid_scale(self):
        with pytest.raises(InputError):
            gen_identity_ball(1)


class TestL1Basis:
    @pytest.mark.parametrize("K", [2, 3, 4])
    def test_expected_table(self, K):
        assert_table_passes(gen_l1_basis(K))

    def test_fully_enumerated_k3(self):
        ex = gen_l1_basis(3)
        img = family_image(ex.family)
        # image = 3 basis vectors + origin; brute alpha at k=2 pairs two basis vectors
        assert brute_minimax_partition(distance_matrix(img), 2) == 2.0
        assert evaluate_quantity(ex, "family_gamma", {"k": 1, "pool": "g"}) == 0.5

    def test_tproxy_pinned_at_one_for_all_budgets(self):
        ex = gen_l1_basis(3)
        for k in (1, 2, 3):
            assert evaluate_quantity(ex, "family_gamma", {"k": k, "pool": "tproxy"}) == 1.0


class TestLindenstrauss:
    def test_expected_table_default(self):
        assert_table_passes(gen_lindenstrauss_bumps())

    def test_bigger_scale(self):
        assert_table_passes(gen_lindenstrauss_bumps(d=5, n_balls=4, samples_per_ball=7))

    def test_centers_too_close_rejected(self):
        with pytest.raises(InputError):
            gen_lindenstrauss_bumps(n_balls=1)

    def test_brute_forced_small(self):
        ex = gen_lindenstrauss_bumps()
        fam = ex.family
        pool = ex.pools["phi"]
        got = brute_omega_ext(fam.values, pool.values, "linf", 1, 1)
        assert got == 1.0


class TestRamp:
    def test_expected_table(self):
        assert_table_passes(gen_ramp_family(6, 121))

    def test_grid_too_coarse(self):
        with pytest.raises(InputError):
            gen_ramp_family(6, 100)

    def test_budget_decay_trend(self):
        ex = gen_ramp_family(6, 121)
        vals = [evaluate_quantity(ex, "mu_alpha", {"k": k}) for k in (1, 2, 3, 4)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == 0.0


class TestIntervalSpikes:
    def test_expected_table(self):
        assert_table_passes(gen_interval_spikes_ck())

    def test_window_rows_shrink(self):
        ex = gen_interval_spikes_ck(3)
        window_rows = [r for r in ex.expected if r.quantity == "window_sigma_alpha"]
        diams = [r.expected for r in window_rows]
        assert all(b < a for a, b in zip(diams, diams[1:]))

    def test_scale_errors(self):
        with pytest.raises(InputError):
            gen_interval_spikes_ck(1)


class TestC01RampSpikes:
    def test_expected_table(self):
        assert_table_passes(gen_c01_ramp_spikes())

    def test_partitioned_budget_halves_value(self):
        ex = gen_c01_ramp_spikes(3, 2, 5)
        one_part = evaluate_quantity(ex, "omega_ext", {"n": 1, "m": 1, "pool": "phi"})
        k_parts = evaluate_quantity(ex, "omega_ext", {"n": 3, "m": 1, "pool": "phi"})
        assert one_part == 1.0
        assert k_parts == 0.5


class TestRegistry:
    def test_all_generators_registered(self):
        assert set(GENERATORS) == {
            "spike",
            "identity-ball",
            "l1-basis",
            "lindenstrauss",
            "ramp",
            "interval-spikes-ck",
            "c01-ramp-spikes",
        }

    def test_every_default_table_passes(self):
        defaults = {
            "spike": dict(K=3, N=2),
            "identity-ball": dict(d=2),
            "l1-basis": dict(K=3),
            "lindenstrauss": {},
            "ramp": {},
            "interval-spikes-ck": {},
            "c01-ramp-spikes": {},
        }
        for name, kwargs in defaults.items():
            assert_table_passes(GENERATORS[name](**kwargs))
