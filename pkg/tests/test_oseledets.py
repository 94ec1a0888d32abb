import math

import numpy as np
import pytest

from cocyclelab.cocycle import FiniteCocycle, sample_path
from cocyclelab.errors import AlphabetMismatch, DegenerateGap
from cocyclelab.experiments import perturb_matrices
from cocyclelab.oseledets import (
    angle_convergence_experiment,
    estimate_frame,
    estimate_stable,
    estimate_unstable,
)
from cocyclelab.projective import (
    HORIZONTAL,
    VERTICAL,
    ProjPoint,
    angle_between,
    mat2,
    proj_apply,
)

UPPER = mat2(2.0, 1.0, 0.0, 0.5)  # eigenvalues 2 and 1/2


def diagonal_base(sigma=2.0, weights=(0.7, 0.3)):
    mats = np.stack([mat2(sigma, 0, 0, 1 / sigma), mat2(1 / sigma, 0, 0, sigma)])
    return FiniteCocycle(mats, np.array(weights))


def single(m):
    return FiniteCocycle(np.stack([m]), np.array([1.0]))


class TestSingleMatrix:
    def test_unstable_is_top_eigendirection(self):
        est = estimate_unstable(single(UPPER), np.zeros(50, dtype=np.int64))
        # eigenvector of eigenvalue 2 is (1, 0)
        assert angle_between(est, HORIZONTAL) < 1e-6

    def test_stable_is_contracted_eigendirection(self):
        est = estimate_stable(single(UPPER), np.zeros(50, dtype=np.int64))
        # (UPPER - 0.5 I) v = 0 gives v proportional to (2, -3)
        assert angle_between(est, ProjPoint(2.0, -3.0)) < 1e-6

    def test_rotation_degenerate(self):
        rot = single(mat2(0.0, -1.0, 1.0, 0.0))
        with pytest.raises(DegenerateGap):
            estimate_unstable(rot, np.zeros(10, dtype=np.int64))

    def test_gap_estimate_converges(self):
        c = single(mat2(2.0, 0.0, 0.0, 0.5))
        frame = estimate_frame(
            c, np.zeros(200, dtype=np.int64), np.zeros(200, dtype=np.int64)
        )
        assert frame.gap_estimate == pytest.approx(2.0 * math.log(2.0), rel=1e-9)


class TestDiagonalCocycle:
    def test_unstable_horizontal_for_typical_words(self):
        c = diagonal_base()
        hits = 0
        for i in range(50):
            word = sample_path(c, 150, seed=100 + i).symbols
            # the diagonal product expands H iff the net symbol balance does
            est = estimate_unstable(c, word)
            target = (
                HORIZONTAL if np.sum(word == 0) > np.sum(word == 1) else VERTICAL
            )
            if angle_between(est, target) < 1e-9:
                hits += 1
        assert hits == 50

    def test_stable_vertical_for_typical_words(self):
        c = diagonal_base()
        word = sample_path(c, 150, seed=200).symbols
        assert np.sum(word == 0) > np.sum(word == 1)
        assert angle_between(estimate_stable(c, word), VERTICAL) < 1e-9

    def test_frames_transverse(self):
        c = diagonal_base()
        word = sample_path(c, 100, seed=201).symbols
        frame = estimate_frame(c, word, word)
        assert angle_between(frame.unstable, frame.stable) >= 0.1


class TestEquivariance:
    def test_pushforward_matches_extended_word(self):
        rng = np.random.default_rng(42)
        mats = np.stack(
            [mat2(2.0, 0.3, 0.1, 0.6), mat2(0.7, -0.2, 0.4, 1.8)]
        )
        c = FiniteCocycle(mats, np.array([0.5, 0.5]))
        word = rng.integers(0, 2, size=120).astype(np.int64)
        eu = estimate_unstable(c, word)
        for nxt in (0, 1):
            extended = np.concatenate([word, [nxt]])
            lhs = proj_apply(c.matrices[nxt], eu)
            rhs = estimate_unstable(c, extended)
            assert angle_between(lhs, rhs) < 1e-6

    def test_depth_consistency(self):
        c = diagonal_base()
        word = sample_path(c, 400, seed=202).symbols
        shallow = estimate_unstable(c, word[200:])
        deep = estimate_unstable(c, word)
        assert angle_between(shallow, deep) < 1e-6


class TestAngleConvergence:
    def test_identical_cocycles_fraction_one(self):
        c = diagonal_base()
        res = angle_convergence_experiment(c, c, eps=0.2, depth=50, n_points=100, seed=0)
        assert res.fraction == 1.0

    def test_eps_right_angle_fraction_one(self):
        c = diagonal_base()
        b = perturb_matrices(c, 0.2)
        res = angle_convergence_experiment(
            c, b, eps=math.pi / 2 + 1e-9, depth=50, n_points=100, seed=0
        )
        assert res.fraction == 1.0

    def test_fraction_non_decreasing_in_gamma(self):
        c = diagonal_base()
        fractions = []
        for gamma in (0.1, 0.05, 0.01):
            b = perturb_matrices(c, gamma)
            res = angle_convergence_experiment(
                c, b, eps=0.2, depth=100, n_points=400, seed=1
            )
            fractions.append(res.fraction)
        assert all(a <= b + 1e-12 for a, b in zip(fractions, fractions[1:]))

    def test_alphabet_mismatch(self):
        c = diagonal_base()
        other = FiniteCocycle(
            np.stack([np.eye(2)] * 3), np.array([0.4, 0.3, 0.3])
        )
        with pytest.raises(AlphabetMismatch):
            angle_convergence_experiment(c, other, 0.2, 10, 10, seed=0)

    def test_exclusions_reported(self):
        rot = FiniteCocycle(
            np.stack([mat2(0.0, -1.0, 1.0, 0.0)] * 2), np.array([0.5, 0.5])
        )
        res = angle_convergence_experiment(
            rot, rot, eps=0.2, depth=10, n_points=20, seed=2
        )
        assert res.n_excluded == 20
        assert res.n_valid == 0
        assert res.fraction == 0.0
