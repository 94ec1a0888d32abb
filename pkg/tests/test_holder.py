import math

import numpy as np
import pytest

from cocyclelab.cocycle import word_product
from cocyclelab.errors import (
    InsufficientReturns,
    InvalidParams,
    WordNotInCylinder,
)
from cocyclelab.holder import (
    ShiftMetricParams,
    WindowTable,
    build_construction,
    holder_bound,
    holder_seminorm,
    induced_return_experiment,
    kifer_family,
    perturbation_difference,
    vanishing_exponent_check,
    verify_subspace_swap,
)
from cocyclelab.exponents import estimate_extremal_mc
from cocyclelab.projective import (
    HORIZONTAL,
    VERTICAL,
    ProjPoint,
    angle_between,
    mat2,
)


class TestConstruction:
    def test_k1_shape(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        assert c.n == 3
        assert c.eps == pytest.approx(0.5)
        assert c.delta == pytest.approx(math.atan(0.5))
        assert c.cocycle.radius == 2
        assert c.cocycle.table.shape == (32, 2, 2)
        assert np.array_equal(c.cylinder_word, [1, 0, 0])
        assert c.cylinder_measure == pytest.approx(0.3 * 0.7**2)
        assert c.unperturbed_lambda_plus == pytest.approx(0.4 * math.log(2.0))

    def test_invalid_params(self):
        with pytest.raises(InvalidParams):
            build_construction(1.0, 1, (0.7, 0.3))
        with pytest.raises(InvalidParams):
            build_construction(2.0, 0, (0.7, 0.3))
        with pytest.raises(InvalidParams):
            build_construction(2.0, 1, (1.0, 0.0))

    def test_all_determinants_unimodular(self):
        for k in (1, 2):
            c = build_construction(2.0, k, (0.7, 0.3))
            dets = np.abs(np.linalg.det(c.cocycle.table))
            assert np.allclose(dets, 1.0, atol=1e-12)

    def test_perturbation_supported_on_three_orbit_sets(self):
        # most window words see the unperturbed diagonal matrix
        c = build_construction(2.0, 1, (0.7, 0.3))
        diff = perturbation_difference(c)
        changed = np.array(
            [np.abs(diff.table[i]).max() > 0 for i in range(32)]
        )
        # 3 membership patterns x 4 free digits / overlaps: strictly between
        assert 0 < changed.sum() < 32


class TestSubspaceSwap:
    @pytest.mark.parametrize("sigma", [2.0, 4.0])
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_all_stages_pass(self, sigma, k):
        c = build_construction(sigma, k, (0.7, 0.3))
        checks = verify_subspace_swap(c, tol=1e-10)
        assert all(checks.values()), checks

    def test_unperturbed_preserves_axes(self):
        c = build_construction(2.0, 2, (0.7, 0.3))
        word = np.concatenate([c.cylinder_word, np.zeros(4, dtype=np.int64)])
        direction, _, _ = word_product(c.unperturbed, word)
        img_h = ProjPoint.from_vector(direction @ HORIZONTAL.as_vector())
        img_v = ProjPoint.from_vector(direction @ VERTICAL.as_vector())
        assert angle_between(img_h, HORIZONTAL) == 0.0
        assert angle_between(img_v, VERTICAL) == 0.0

    def test_word_must_contain_cylinder(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        with pytest.raises(WordNotInCylinder):
            verify_subspace_swap(c, word=np.zeros(7, dtype=np.int64))
        with pytest.raises(WordNotInCylinder):
            verify_subspace_swap(c, word=np.zeros(5, dtype=np.int64))

    def test_double_swap_returns_horizontal(self):
        # a path lying in the cylinder at positions 0 and n composes two
        # axis swaps: H -> V -> H
        c = build_construction(2.0, 1, (0.7, 0.3))
        k, n = c.k, c.n
        symbols = np.zeros(2 * n + 4 * k, dtype=np.int64)
        symbols[2 * k : 2 * k + n] = c.cylinder_word
        symbols[2 * k + n : 2 * k + 2 * n] = c.cylinder_word
        direction, _, _ = c.cocycle.product_along(symbols)
        img = ProjPoint.from_vector(direction @ HORIZONTAL.as_vector())
        assert angle_between(img, HORIZONTAL) < 1e-10


class TestSeminorm:
    def _zero_table(self, radius=1):
        size = 2 ** (2 * radius + 1)
        return WindowTable(2, radius, np.zeros((size, 2, 2), dtype=np.complex128))

    def test_zero_function(self):
        norm = holder_seminorm(self._zero_table(), ShiftMetricParams(0.5))
        assert norm.total == 0.0

    def test_constant_function(self):
        const = mat2(0.3, 0.0, 1.0, -0.2)
        table = np.broadcast_to(const, (8, 2, 2)).copy()
        norm = holder_seminorm(WindowTable(2, 1, table), ShiftMetricParams(0.5))
        assert norm.sup_term == pytest.approx(np.linalg.norm(const, 2))
        assert norm.quotient_term == 0.0

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_bounded_in_contracting_regime(self, k):
        sigma, r = 4.0, 0.5
        c = build_construction(sigma, k, (0.7, 0.3))
        norm = holder_seminorm(perturbation_difference(c), ShiftMetricParams(r))
        assert norm.total <= holder_bound(sigma, r, k)

    def test_decay_ratio_tracks_bound(self):
        sigma, r = 4.0, 0.5
        factor = 2.0 ** (2.0 * r) / sigma
        totals = []
        for k in (1, 2, 3):
            c = build_construction(sigma, k, (0.7, 0.3))
            totals.append(
                holder_seminorm(perturbation_difference(c), ShiftMetricParams(r)).total
            )
        for a, b in zip(totals, totals[1:]):
            assert 0.25 * factor <= b / a <= 1.0

    def test_grows_outside_regime(self):
        # 2^(2r) > sigma: the seminorm of the perturbation grows with k
        sigma, r = 2.0, 0.8
        params = ShiftMetricParams(r)
        assert not params.in_discontinuity_regime(sigma)
        totals = [
            holder_seminorm(
                perturbation_difference(build_construction(sigma, k, (0.7, 0.3))),
                params,
            ).total
            for k in (1, 2, 3)
        ]
        assert totals[0] < totals[1] < totals[2]

    def test_regime_flag(self):
        assert ShiftMetricParams(0.5).in_discontinuity_regime(4.0)
        assert not ShiftMetricParams(0.5).in_discontinuity_regime(2.0)
        with pytest.raises(InvalidParams):
            ShiftMetricParams(0.0)


class TestVanishingExponent:
    def test_unperturbed_value(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        est = estimate_extremal_mc(c.unperturbed, 50_000, 32, seed=0)
        target = c.unperturbed_lambda_plus
        assert abs(est.lambda_plus - target) <= 3 * est.stderr_plus

    @pytest.mark.parametrize("k", [1, 2])
    def test_perturbed_collapse(self, k):
        c = build_construction(2.0, k, (0.7, 0.3))
        est = vanishing_exponent_check(c, 200_000, 4, seed=1)
        assert abs(est.lambda_plus) < 0.5 * c.unperturbed_lambda_plus


class TestInducedReturns:
    def test_mean_return_matches_kac(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        mean_return, _ = induced_return_experiment(c, 500_000, seed=2)
        assert mean_return == pytest.approx(1.0 / c.cylinder_measure, rel=0.05)

    def test_unperturbed_induced_exponent(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        mean_return, induced = induced_return_experiment(
            c, 1_000_000, seed=3, perturbed=False
        )
        assert induced / mean_return == pytest.approx(
            c.unperturbed_lambda_plus, rel=0.1
        )

    def test_perturbed_induced_exponent_small(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        mean_return, induced = induced_return_experiment(c, 1_000_000, seed=4)
        assert abs(induced / mean_return) < 0.1 * c.unperturbed_lambda_plus

    def test_insufficient_returns(self):
        c = build_construction(2.0, 1, (0.7, 0.3))
        with pytest.raises(InsufficientReturns):
            induced_return_experiment(c, 300, seed=5)


class TestKiferFamily:
    def test_construction(self):
        c = kifer_family(2.0, 0.7)
        assert np.allclose(c.weights, [0.7, 0.3])
        assert np.allclose(c.matrices[1], mat2(0.0, -1.0, 1.0, 0.0))
        with pytest.raises(InvalidParams):
            kifer_family(0.5, 0.5)
        with pytest.raises(InvalidParams):
            kifer_family(2.0, 1.5)

    def test_boundary_weight_exact(self):
        est = estimate_extremal_mc(kifer_family(2.0, 1.0), 10_000, 1, seed=6)
        assert est.lambda_plus == pytest.approx(math.log(2.0), rel=1e-12)

    def test_crossover_near_boundary(self):
        # p1 = 0.99: the estimate only relaxes to 0 once the path is long
        # enough to feel the rare rotations (n >> 1/(1 - p1))
        c = kifer_family(2.0, 0.99)
        estimates = [
            abs(estimate_extremal_mc(c, n, 1, seed=7).lambda_plus)
            for n in (10**3, 10**5, 10**7)
        ]
        assert estimates[0] > estimates[1] > estimates[2]
        assert estimates[0] > 0.3 * math.log(2.0)
        assert estimates[2] < 0.05
