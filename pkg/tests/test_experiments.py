import math

import numpy as np
import pytest

from cocyclelab.cocycle import FiniteCocycle, cocycle_distance
from cocyclelab.errors import InvalidParams, PerturbationLeavesGL
from cocyclelab.experiments import (
    default_direction,
    perturb_matrices,
    perturb_weights,
    run_continuity_sweep,
    run_support_jitter,
)
from cocyclelab.exponents import estimate_extremal_mc
from cocyclelab.holder import kifer_family
from cocyclelab.projective import mat2, operator_norm


def diagonal_base(sigma=2.0, weights=(0.7, 0.3)):
    mats = np.stack([mat2(sigma, 0, 0, 1 / sigma), mat2(1 / sigma, 0, 0, sigma)])
    return FiniteCocycle(mats, np.array(weights))


class TestPerturbations:
    def test_default_direction_unit_norm(self):
        assert operator_norm(default_direction()) == pytest.approx(1.0)

    def test_default_direction_breaks_axes(self):
        d = default_direction()
        assert abs(d[0, 1]) > 0 and abs(d[1, 0]) > 0

    def test_distance_equals_gamma(self):
        base = diagonal_base()
        for gamma in (0.2, 0.05, 0.0):
            assert cocycle_distance(base, perturb_matrices(base, gamma)) == (
                pytest.approx(gamma, abs=1e-12)
            )

    def test_negative_gamma_rejected(self):
        with pytest.raises(InvalidParams):
            perturb_matrices(diagonal_base(), -0.1)

    def test_singular_perturbation_rejected(self):
        base = FiniteCocycle(np.stack([np.eye(2)]), np.array([1.0]))
        direction = mat2(-1.0, 0.0, 0.0, -1.0)
        with pytest.raises(PerturbationLeavesGL):
            perturb_matrices(base, 1.0, direction)

    def test_weight_perturbation_total_variation(self):
        base = diagonal_base()
        out = perturb_weights(base, 0.1)
        assert np.sum(np.abs(out.weights - base.weights)) == pytest.approx(0.1)
        assert out.weights.sum() == pytest.approx(1.0)

    def test_weight_perturbation_leaving_simplex(self):
        with pytest.raises(InvalidParams):
            perturb_weights(diagonal_base(weights=(0.05, 0.95)), 0.2)


class TestContinuitySweep:
    def test_gamma_zero_row_equals_base(self):
        base = diagonal_base()
        sweep = run_continuity_sweep(base, [0.1, 0.0], 2000, 8, seed=0)
        est = estimate_extremal_mc(base, 2000, 8, seed=0)
        last = sweep.rows[-1]
        assert last["gamma"] == 0.0
        assert last["lambda_plus"] == est.lambda_plus
        assert last["lambda_minus"] == est.lambda_minus

    def test_gammas_must_descend(self):
        with pytest.raises(InvalidParams):
            run_continuity_sweep(diagonal_base(), [0.1, 0.2], 100, 2, seed=0)

    def test_diagonal_base_trend(self):
        base = diagonal_base()
        sweep = run_continuity_sweep(
            base, [0.2, 0.1, 0.05, 0.02, 0.01], 20_000, 16, seed=1
        )
        target = 0.4 * math.log(2.0)
        gaps = [abs(r["lambda_plus"] - target) for r in sweep.rows[:-1]]
        assert all(a >= b for a, b in zip(gaps, gaps[1:]))

    def test_kifer_rotation_direction(self):
        base = kifer_family(2.0, 0.5)
        rotation = mat2(0.0, -1.0, 1.0, 0.0)
        sweep = run_continuity_sweep(
            base, [0.2, 0.05, 0.01], 100_000, 8, seed=2, direction=rotation
        )
        lams = [abs(r["lambda_plus"]) for r in sweep.rows]
        # lambda_+ decays toward the unperturbed zero exponent
        assert all(a > b for a, b in zip(lams, lams[1:]))
        assert lams[-1] < 0.01

    def test_weight_mode(self):
        base = diagonal_base()
        sweep = run_continuity_sweep(
            base, [0.1, 0.0], 5000, 8, seed=3, mode="weights"
        )
        assert sweep.rows[0]["distance"] == 0.0  # matrices untouched


class TestSupportJitter:
    def test_trivial_split_reproduces_base(self):
        base = diagonal_base()
        result = run_support_jitter(base, [0.0], 2000, 8, seed=4, split=1)
        est = estimate_extremal_mc(base, 2000, 8, seed=4)
        assert result.rows[0]["lambda_plus"] == est.lambda_plus

    def test_exponent_approaches_base(self):
        base = diagonal_base()
        result = run_support_jitter(
            base, [0.1, 0.05, 0.01], 20_000, 16, seed=5, split=3
        )
        target = 0.4 * math.log(2.0)
        gaps = [abs(r["lambda_plus"] - target) for r in result.rows]
        assert gaps[-1] <= gaps[0]
        assert gaps[-1] < 0.05

    def test_uneven_resplit_at_zero_delta(self):
        base = diagonal_base()
        even = run_support_jitter(base, [0.0], 20_000, 16, seed=6, split=3)
        uneven = run_support_jitter(
            base,
            [0.0],
            20_000,
            16,
            seed=6,
            split=3,
            weight_split=[0.6, 0.3, 0.1],
        )
        a, b = even.rows[0], uneven.rows[0]
        tol = 3 * (a["stderr_plus"] + b["stderr_plus"])
        assert abs(a["lambda_plus"] - b["lambda_plus"]) <= tol

    def test_weight_split_validation(self):
        with pytest.raises(InvalidParams):
            run_support_jitter(
                diagonal_base(), [0.1], 100, 2, seed=0, split=3, weight_split=[1.0]
            )
