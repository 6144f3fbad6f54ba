import json

import numpy as np
import pytest

from conftest import random_family
from noncompactness.core import SpaceTag
from noncompactness.errors import UnsupportedSpaceError, WitnessRejected
from noncompactness.families import (
    Domain,
    FunctionFamily,
    OmegaWitness,
    family_alpha_budget,
    family_gamma_budget,
    omega_ext_budget,
    sup_distance_matrix,
)
from noncompactness.certificates import (
    PointwiseNets,
    budgeted_pointwise_nets,
    construct_alpha_cover,
    construct_gamma_net,
    exact_pointwise_nets,
    lindenstrauss_phi,
    refine_partition_tb,
    sigma_cover_from_alpha,
)
from noncompactness.set_measures import Partition


def witness_and_nets(fam, budget=(1, 2)):
    bv = omega_ext_budget(fam, budget)
    return bv.witness, exact_pointwise_nets(fam, bv.witness)


def singleton_family():
    domain = Domain(("a", "b"))
    space = SpaceTag(2, "linf")
    values = np.array([[[1.0, 0.0], [0.0, 1.0]]])
    return FunctionFamily(domain, space, ("f",), values)


class TestAlphaCover:
    def test_singleton_trivial(self):
        fam = singleton_family()
        w, nets = witness_and_nets(fam, (1, 1))
        report = construct_alpha_cover(fam, w, nets)
        assert report.passed and report.measured == 0.0

    def test_random_families_pass(self, rng):
        for _ in range(25):
            fam = random_family(rng)
            w, nets = witness_and_nets(fam, (1, min(3, len(fam))))
            report = construct_alpha_cover(fam, w, nets)
            assert report.passed
            # canonical cover pieces also certify the family alpha at the
            # transferred budget
            transferred = min(report.transfer_budget, len(fam))
            assert family_alpha_budget(fam, transferred).value <= report.measured + 1e-9

    def test_budgeted_nets_pass(self, rng):
        for _ in range(10):
            fam = random_family(rng)
            bv = omega_ext_budget(fam, (1, min(2, len(fam))))
            nets = budgeted_pointwise_nets(fam, bv.witness, 2)
            assert construct_alpha_cover(fam, bv.witness, nets).passed

    def test_composition_bound(self, rng):
        # measured cover quality never exceeds mu-style b plus twice the modulus
        for _ in range(10):
            fam = random_family(rng)
            bv = omega_ext_budget(fam, (2, min(2, len(fam))))
            nets = exact_pointwise_nets(fam, bv.witness)
            report = construct_alpha_cover(fam, bv.witness, nets)
            assert report.measured <= 2 * bv.value + 1e-9

    def test_corrupted_assignment_rejected(self, rng):
        fam = random_family(rng, max_funcs=4)
        w, nets = witness_and_nets(fam)
        bad = OmegaWitness(
            w.partition, w.phi_names, w.phi_values, tuple(99 for _ in w.assignment), w.value
        )
        with pytest.raises(WitnessRejected, match="out of range"):
            construct_alpha_cover(fam, bad, nets)

    def test_understated_value_rejected(self):
        fam = gen = None
        from noncompactness.generators import gen_spike_linf

        fam = gen_spike_linf(3, 2).family
        bv = omega_ext_budget(fam, (2, 1))
        w = bv.witness
        assert w.value > 0
        bad = OmegaWitness(w.partition, w.phi_names, w.phi_values, w.assignment, w.value / 2)
        with pytest.raises(WitnessRejected, match="corrected diameter"):
            construct_alpha_cover(fam, bad, exact_pointwise_nets(fam, w))

    def test_report_serializes(self, rng):
        fam = random_family(rng)
        w, nets = witness_and_nets(fam)
        doc = construct_alpha_cover(fam, w, nets).to_dict()
        json.dumps(doc)
        assert doc["construction"] == "alpha_cover"


class TestGammaNet:
    def test_constants_family_zero_radius(self):
        domain = Domain(("a", "b", "c"))
        space = SpaceTag(1, "l1")
        values = np.array([[[1.0]] * 3, [[2.0]] * 3])
        fam = FunctionFamily(domain, space, ("c1", "c2"), values)
        w, nets = witness_and_nets(fam, (1, 2))
        report = construct_gamma_net(fam, w, nets)
        assert report.passed and report.measured == 0.0

    def test_random_campaign(self, rng):
        for _ in range(30):
            fam = random_family(rng)
            w, nets = witness_and_nets(fam, (1, min(3, len(fam))))
            report = construct_gamma_net(fam, w, nets)
            assert report.passed
            assert report.measured <= w.value + nets.radius + 1e-9

    def test_l1_truncation_half_net(self):
        from noncompactness.generators import gen_l1_basis

        ex = gen_l1_basis(3)
        pool = ex.pools["g"]
        bv = omega_ext_budget(ex.family, (1, 1), pool=pool)
        nets = exact_pointwise_nets(ex.family, bv.witness)
        report = construct_gamma_net(ex.family, bv.witness, nets)
        assert report.passed
        # the constructed net cannot beat the true pool-restricted k-center value
        gamma = family_gamma_budget(ex.family, 1, pool).value
        assert report.measured >= gamma - 1e-9 or report.measured <= report.claimed

    def test_net_dropped_center_rejected(self, rng):
        fam = random_family(rng, max_funcs=4)
        w, nets = witness_and_nets(fam)
        target = next(j for j, c in enumerate(
            np.bincount(np.asarray(w.assignment), minlength=w.phi_values.shape[0])
        ) if c)
        centers = list(nets.centers)
        centers[target] = np.zeros((0, fam.space.dim))
        bad = PointwiseNets(nets.representatives, tuple(centers), nets.radius)
        with pytest.raises(WitnessRejected, match="empty"):
            construct_gamma_net(fam, w, bad)


class TestRefinePartition:
    def test_zero_delta_exact_images(self, rng):
        for _ in range(20):
            fam = random_family(rng)
            w, _ = witness_and_nets(fam, (2, min(2, len(fam))))
            pooled = np.unique(w.phi_values.reshape(-1, fam.space.dim), axis=0)
            report = refine_partition_tb(fam, w, pooled, 0.0)
            assert report.passed
            assert report.measured <= w.value + 1e-9  # plain omega <= corrected at delta 0
            assert report.constructed["q"] <= report.constructed["q_bound"]

    def test_constant_correction_keeps_partition(self):
        domain = Domain(("a", "b"))
        space = SpaceTag(1, "linf")
        fam = FunctionFamily(domain, space, ("f",), np.array([[[0.0], [1.0]]]))
        w = omega_ext_budget(fam, (2, 1)).witness
        pooled = np.unique(w.phi_values.reshape(-1, 1), axis=0)
        report = refine_partition_tb(fam, w, pooled, 0.0)
        assert report.passed
        assert report.constructed["q"] <= 2 * pooled.shape[0]

    def test_bad_net_rejected(self, rng):
        fam = random_family(rng)
        w, _ = witness_and_nets(fam)
        far = np.full((1, fam.space.dim), 99.0)
        with pytest.raises(WitnessRejected, match="delta-net"):
            refine_partition_tb(fam, w, far, 0.0)

    def test_negative_delta_rejected(self, rng):
        fam = random_family(rng)
        w, _ = witness_and_nets(fam)
        pooled = np.unique(w.phi_values.reshape(-1, fam.space.dim), axis=0)
        with pytest.raises(WitnessRejected, match="nonnegative"):
            refine_partition_tb(fam, w, pooled, -0.1)


class TestSigmaCover:
    def test_random_campaign(self, rng):
        for _ in range(25):
            fam = random_family(rng)
            k = min(3, len(fam))
            cov = family_alpha_budget(fam, k)
            reps = [p[0] for p in cov.witness.parts]
            rep_img = np.unique(fam.values[reps].reshape(-1, fam.space.dim), axis=0)
            report = sigma_cover_from_alpha(fam, cov.witness, cov.value, rep_img, 0.0)
            assert report.passed

    def test_singleton_single_ball(self):
        fam = singleton_family()
        cov = family_alpha_budget(fam, 1)
        rep_img = np.unique(fam.values[0], axis=0)
        report = sigma_cover_from_alpha(fam, cov.witness, cov.value, rep_img, 0.0)
        assert report.passed and report.measured == 0.0

    def test_understated_cover_rejected(self, rng):
        from noncompactness.generators import gen_spike_linf

        fam = gen_spike_linf(3, 2).family
        cover = Partition((tuple(range(len(fam))),))
        rep_img = np.unique(fam.values[0], axis=0)
        with pytest.raises(WitnessRejected, match="sup diameter"):
            sigma_cover_from_alpha(fam, cover, 0.0, rep_img, 0.0)


class TestLindenstraussPhi:
    def test_two_function_piece_achieves_half(self):
        domain = Domain(("a", "b"))
        space = SpaceTag(2, "linf")
        values = np.array(
            [[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
        )
        fam = FunctionFamily(domain, space, ("f", "g"), values)
        a = float(sup_distance_matrix(fam).max())
        cover = Partition(((0, 1),))
        report = lindenstrauss_phi(fam, cover, a)
        assert report.passed
        assert report.measured == pytest.approx(a / 2, abs=1e-12)

    def test_linf_random_campaign(self, rng):
        for _ in range(20):
            fam = random_family(rng, tag="linf")
            k = min(3, len(fam))
            cov = family_alpha_budget(fam, k)
            report = lindenstrauss_phi(fam, cov.witness, cov.value)
            assert report.passed
            assert report.constructed["omega_style_measured"] <= (
                report.constructed["omega_style_claimed"] + 1e-9
            )

    def test_l2_uses_enclosing_ball_radius(self, rng):
        fam = random_family(rng, tag="l2")
        cov = family_alpha_budget(fam, min(2, len(fam)))
        report = lindenstrauss_phi(fam, cov.witness, cov.value)
        assert report.passed

    def test_l1_rejected(self, rng):
        fam = random_family(rng, tag="l1")
        cov = family_alpha_budget(fam, 1)
        with pytest.raises(UnsupportedSpaceError):
            lindenstrauss_phi(fam, cov.witness, cov.value)

    def test_outer_net_rejected(self, rng):
        fam = random_family(rng, tag="linf")
        cov = family_alpha_budget(fam, 1)
        nets = {
            (pi, x): np.full((1, fam.space.dim), 123.0)
            for pi in range(cov.witness.n_parts)
            for x in range(len(fam.domain))
        }
        with pytest.raises(WitnessRejected, match="not inner"):
            lindenstrauss_phi(fam, cov.witness, cov.value, delta=0.0, point_nets=nets)

    def test_lindenstrauss_example_cover(self):
        from noncompactness.generators import gen_lindenstrauss_bumps

        ex = gen_lindenstrauss_bumps()
        cov = family_alpha_budget(ex.family, 2)
        report = lindenstrauss_phi(ex.family, cov.witness, cov.value)
        assert report.passed
        assert report.claimed == pytest.approx(0.5 * cov.value, abs=1e-12)
