import numpy as np
import pytest

from conftest import random_family
from oracles import brute_omega, brute_omega_ext, brute_sup_dist, family_conflict_matrix
from noncompactness.core import PointSet, SpaceTag
from noncompactness.errors import InputError
from noncompactness.families import (
    Domain,
    FunctionFamily,
    conflict_matrix,
    convex_combination,
    family_alpha_budget,
    family_at_point,
    family_gamma_budget,
    family_image,
    function_image,
    heinz_lower_diagnostic,
    ambrosetti_report,
    minkowski_sum,
    mu_alpha_budget,
    mu_gamma_budget,
    nussbaum_modulus,
    omega_budget,
    omega_ext_budget,
    omega_ext_lower_bound,
    scale,
    sigma_alpha_budget,
    sigma_gamma_budget,
    sup_dist,
    sup_distance_matrix,
    sup_norm,
    union,
)
from noncompactness.generators import gen_l1_basis, gen_spike_linf
from noncompactness.set_measures import alpha_budget


def small_family(values, tag="linf", names=None):
    values = np.asarray(values, dtype=float)
    n_f, n_p, dim = values.shape
    domain = Domain(tuple(f"p{i}" for i in range(n_p)))
    names = names or tuple(f"f{i}" for i in range(n_f))
    return FunctionFamily(domain, SpaceTag(dim, tag), tuple(names), values)


class TestSupNorms:
    def test_spike_pairwise_distances(self):
        fam = gen_spike_linf(3, 2).family
        for i in range(3):
            for j in range(i + 1, 3):
                assert sup_dist(fam, i, j) == 1.0

    def test_self_distance_zero(self):
        fam = gen_spike_linf(2, 2).family
        assert sup_dist(fam, 0, 0) == 0.0

    def test_l1_distance_to_g(self):
        ex = gen_l1_basis(3)
        pool = ex.pools["g"]
        merged = union(ex.family, pool)
        assert sup_dist(merged, "f1", "g") == 0.5

    def test_sup_norm_matches_oracle(self, rng):
        fam = random_family(rng)
        mat = sup_distance_matrix(fam)
        for i in range(len(fam)):
            assert sup_norm(fam, i) >= 0.0
            for j in range(len(fam)):
                assert mat[i, j] == pytest.approx(
                    brute_sup_dist(fam.values[i], fam.values[j], fam.space.norm), abs=1e-12
                )


class TestValueSets:
    def test_spike_point_sets(self):
        fam = gen_spike_linf(3, 2).family
        at_base = family_at_point(fam, "base")
        assert len(at_base) == 1 and np.all(at_base.points == 0.0)
        at_spike = family_at_point(fam, "s2.1")
        assert len(at_spike) == 2  # the zero value and one basis vector

    def test_unknown_label(self):
        fam = gen_spike_linf(2, 2).family
        with pytest.raises(InputError):
            family_at_point(fam, "nope")

    def test_identity_image_is_sample_set(self):
        vals = np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])
        fam = small_family(vals)
        img = family_image(fam)
        assert len(img) == 3


class TestPointwiseAndImage:
    def test_spike_mu_alpha(self):
        fam = gen_spike_linf(3, 2).family
        assert mu_alpha_budget(fam, 1).value == 1.0
        assert mu_alpha_budget(fam, 2).value == 0.0

    def test_singleton_family_zero(self):
        vals = np.array([[[0.5, 0.5], [1.0, 0.0]]])
        fam = small_family(vals)
        for k in (1, 2, 3):
            assert mu_alpha_budget(fam, k).value == 0.0
            assert mu_gamma_budget(fam, k).value == 0.0

    def test_constant_family_sigma_zero(self):
        vals = np.tile(np.array([1.0, 2.0]), (3, 4, 1))
        fam = small_family(vals, tag="l1")
        assert sigma_alpha_budget(fam, 1).value == 0.0
        assert sigma_gamma_budget(fam, 1).value == 0.0

    def test_l1_sigma_gamma_with_midpoints(self):
        ex = gen_l1_basis(3)
        assert sigma_gamma_budget(ex.family, 2, extras=ex.pools["midpoints"]).value == 1.0

    def test_mu_gamma_pool_rules(self, rng):
        fam = random_family(rng, max_funcs=4, max_domain=5)
        base = mu_gamma_budget(fam, 2).value
        with_extras = mu_gamma_budget(fam, 2, extras=np.zeros((1, fam.space.dim))).value
        assert with_extras <= base + 1e-12  # enlarging the pool cannot hurt
        via_pool = mu_gamma_budget(fam, 2, phi_pool=fam).value
        assert via_pool == pytest.approx(base, abs=1e-12)


class TestOmega:
    def test_spike_omega_profile(self):
        fam = gen_spike_linf(3, 2).family
        for n in range(1, 7):
            assert omega_budget(fam, n).value == 1.0
        assert omega_budget(fam, 7).value == 0.0

    def test_full_budget_zero(self, rng):
        fam = random_family(rng)
        assert omega_budget(fam, len(fam.domain)).value == 0.0

    def test_conflict_reduction_matches_naive_enumeration(self, rng):
        for _ in range(20):
            fam = random_family(rng, max_domain=5, max_funcs=4, max_dim=3)
            for n in range(1, len(fam.domain) + 1):
                got = omega_budget(fam, n).value
                want = brute_omega(fam.values, fam.space.norm, n)
                assert got == pytest.approx(want, abs=1e-12)

    def test_conflict_matrix_matches_oracle(self, rng):
        fam = random_family(rng)
        assert np.allclose(
            conflict_matrix(fam),
            family_conflict_matrix(fam.values, fam.space.norm),
            atol=1e-12,
        )

    def test_due_identity_budgeted(self, rng):
        # singleton modulus equals the image partition measure at every budget
        for _ in range(20):
            fam = random_family(rng, max_funcs=1)
            img = function_image(fam, 0)
            for n in range(1, len(fam.domain) + 2):
                lhs = omega_budget(fam, n).value
                rhs = alpha_budget(img, n).value
                assert lhs == pytest.approx(rhs, abs=1e-12)


class TestOmegaExt:
    def test_self_pool_full_budget_zero(self):
        fam = gen_spike_linf(3, 2).family
        assert omega_ext_budget(fam, (1, 3)).value == 0.0

    def test_matches_oracle_small(self, rng):
        for _ in range(10):
            fam = random_family(rng, max_domain=4, max_funcs=3, max_dim=2)
            pool = FunctionFamily(
                fam.domain,
                fam.space,
                ("q0", "q1"),
                rng.integers(-4, 5, size=(2, len(fam.domain), fam.space.dim)) / 2.0,
            )
            for n in (1, 2):
                for m in (1, 2):
                    got = omega_ext_budget(fam, (n, m), pool=pool).value
                    want = brute_omega_ext(fam.values, pool.values, fam.space.norm, n, m)
                    assert got == pytest.approx(want, abs=1e-12)

    def test_pool_self_correction_factor(self, rng):
        # replacing outside corrections by fiber members costs at most a factor 2
        for _ in range(12):
            fam = random_family(rng, max_domain=5, max_funcs=4, max_dim=2)
            pool = FunctionFamily(
                fam.domain,
                fam.space,
                ("q0", "q1", "q2"),
                rng.integers(-4, 5, size=(3, len(fam.domain), fam.space.dim)) / 2.0,
            )
            for budget in ((1, 2), (2, 2)):
                with_pool = omega_ext_budget(fam, budget, pool=pool).value
                with_self = omega_ext_budget(fam, budget).value
                assert with_self <= 2 * with_pool + 1e-12

    def test_lower_relaxation_and_upper_descent(self, rng):
        for _ in range(12):
            fam = random_family(rng, max_domain=5, max_funcs=4, max_dim=2)
            for budget in ((1, 2), (2, 1), (2, 2)):
                exact = omega_ext_budget(fam, budget).value
                lower = omega_ext_lower_bound(fam, budget[0]).value
                upper = omega_ext_budget(fam, budget, mode="heuristic")
                assert lower <= exact + 1e-12
                assert exact <= upper.value + 1e-12
                assert upper.kind == "upper"

    def test_witness_is_feasible(self, rng):
        from noncompactness.certificates import construct_alpha_cover, exact_pointwise_nets

        fam = random_family(rng, max_funcs=4)
        bv = omega_ext_budget(fam, (1, 2))
        report = construct_alpha_cover(fam, bv.witness, exact_pointwise_nets(fam, bv.witness))
        assert report.passed


class TestBudgetedTheoremLowerSides:
    def test_alpha_side(self, rng):
        for _ in range(20):
            fam = random_family(rng)
            for k in range(1, len(fam) + 1):
                alpha = family_alpha_budget(fam, k).value
                assert mu_alpha_budget(fam, k).value <= alpha + 1e-12
                assert omega_ext_budget(fam, (1, k)).value <= 2 * alpha + 1e-12

    def test_gamma_side(self, rng):
        for _ in range(20):
            fam = random_family(rng)
            pool = fam
            for k in range(1, len(fam) + 1):
                gamma = family_gamma_budget(fam, k, pool).value
                assert mu_gamma_budget(fam, k, phi_pool=pool).value <= gamma + 1e-12
                assert omega_ext_budget(fam, (1, k), pool=pool).value <= 2 * gamma + 1e-12


class TestFamilyAlgebra:
    def test_scale_zero_is_zero_family(self, rng):
        fam = random_family(rng)
        zeroed = scale(0.0, fam)
        assert np.all(zeroed.values == 0.0)

    def test_union_self_collapses(self, rng):
        fam = random_family(rng)
        assert len(union(fam, fam)) == len(fam)

    def test_minkowski_singletons(self):
        a = small_family(np.array([[[1.0, 0.0], [0.0, 0.0]]]), names=("f",))
        b = small_family(np.array([[[0.0, 1.0], [1.0, 1.0]]]), names=("g",))
        s = minkowski_sum(a, b)
        assert len(s) == 1 and s.names == ("f+g",)
        assert np.array_equal(s.values[0], a.values[0] + b.values[0])

    def test_monotone_under_inclusion(self, rng):
        for _ in range(10):
            fam = random_family(rng, max_funcs=5)
            if len(fam) < 2:
                continue
            sub = fam.subfamily(list(range(len(fam) - 1)))
            for k in (1, 2):
                assert mu_alpha_budget(sub, k).value <= mu_alpha_budget(fam, k).value + 1e-12
                assert sigma_alpha_budget(sub, k).value <= sigma_alpha_budget(fam, k).value + 1e-12
                assert omega_budget(sub, k).value <= omega_budget(fam, k).value + 1e-12
                assert omega_ext_budget(sub, (1, k), pool=fam).value <= (
                    omega_ext_budget(fam, (1, k), pool=fam).value + 1e-12
                )

    def test_homogeneity_of_characteristics(self, rng):
        fam = random_family(rng)
        doubled = scale(2.0, fam)
        for k in (1, 2):
            assert mu_alpha_budget(doubled, k).value == pytest.approx(
                2 * mu_alpha_budget(fam, k).value, rel=1e-9, abs=1e-12
            )
            assert omega_budget(doubled, k).value == pytest.approx(
                2 * omega_budget(fam, k).value, rel=1e-9, abs=1e-12
            )

    def test_convexity_surrogate_at_product_budgets(self, rng):
        for _ in range(10):
            a = random_family(rng, max_domain=4, max_funcs=3, max_dim=2, tag="l1")
            b = FunctionFamily(
                a.domain,
                a.space,
                tuple(f"g{i}" for i in range(2)),
                rng.integers(-4, 5, size=(2, len(a.domain), a.space.dim)) / 2.0,
            )
            lam = 0.5
            mix = convex_combination(lam, a, b)
            lhs = mu_alpha_budget(mix, 4).value
            rhs = lam * mu_alpha_budget(a, 2).value + (1 - lam) * mu_alpha_budget(b, 2).value
            assert lhs <= rhs + 1e-12

    def test_domain_mismatch_rejected(self, rng):
        a = random_family(rng, max_domain=3)
        b = random_family(rng, max_domain=3)
        if a.domain.labels != b.domain.labels or a.space != b.space:
            with pytest.raises(InputError):
                minkowski_sum(a, b)


class TestNussbaum:
    def _metrized(self):
        ts = np.linspace(0.0, 1.0, 5)
        domain = Domain(tuple(f"t{i}" for i in range(5)), coords=ts[:, None], metric="linf")
        values = np.asarray([(2 * ts)[:, None], (ts**2)[:, None]])
        return FunctionFamily(domain, SpaceTag(1, "linf"), ("lin", "sq"), values)

    def test_zero_delta(self):
        assert nussbaum_modulus(self._metrized(), 0.0) == 0.0

    def test_full_delta_is_max_image_diameter(self):
        fam = self._metrized()
        worst = max(
            alpha_budget(function_image(fam, i), 1).value for i in range(len(fam))
        )
        assert nussbaum_modulus(fam, 1.0) == pytest.approx(worst, abs=1e-12)

    def test_nondecreasing(self):
        fam = self._metrized()
        vals = [nussbaum_modulus(fam, d) for d in (0.0, 0.25, 0.5, 1.0)]
        assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_requires_metrized_domain(self, rng):
        fam = random_family(rng)
        with pytest.raises(InputError):
            nussbaum_modulus(fam, 0.5)

    def test_sup_lipschitz_in_family(self):
        fam = self._metrized()
        bumped_values = fam.values.copy()
        bumped_values[0] += 0.25
        bumped = FunctionFamily(fam.domain, fam.space, fam.names, bumped_values)
        shift = sup_dist(union(fam, scale(1.0, bumped)), 0, len(fam))
        for delta in (0.25, 0.5):
            assert abs(
                nussbaum_modulus(bumped, delta) - nussbaum_modulus(fam, delta)
            ) <= 2 * shift + 1e-12


class TestDiagnostics:
    def test_heinz_reports_fields(self, rng):
        fam = random_family(rng)
        diag = heinz_lower_diagnostic(fam, 2)
        assert set(diag) == {
            "mu_alpha", "omega", "sup_single_sigma_alpha", "lower_combination", "family_alpha",
        }

    def test_ambrosetti_gap_nonnegative(self, rng):
        fam = random_family(rng)
        diag = ambrosetti_report(fam, 2)
        assert diag["gap"] >= -1e-12
