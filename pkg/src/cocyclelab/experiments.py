"""Continuity-style experiments: perturbation families, sweeps, support jitter.

The default perturbation direction is dominated by a gap-shrinking diagonal
component with a small shear + rotation admixture, normalized to unit
operator norm.  The off-diagonal part breaks the invariant axes of diagonal
cocycles (the hard case for continuity); keeping it small makes the effect
of the perturbation shrink monotonically with its size instead of being
swamped by the axis-mixing tails.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cocycle import FiniteCocycle, cocycle_distance
from .errors import InvalidParams, PerturbationLeavesGL, SingularMatrix
from .exponents import estimate_extremal_mc
from .projective import mat2, operator_norm

__all__ = [
    "default_direction",
    "perturb_matrices",
    "perturb_weights",
    "SweepResult",
    "run_continuity_sweep",
    "run_support_jitter",
]


def default_direction() -> np.ndarray:
    """Unit-operator-norm gap-shrinking diagonal + small shear/rotation mix."""
    raw = mat2(-1.0, 0.0, 0.0, 1.0) + 0.02 * (
        mat2(0.0, 1.0, 1.0, 0.0) + 0.5 * mat2(0.0, -1.0, 1.0, 0.0)
    )
    return raw / operator_norm(raw)


def perturb_matrices(base: FiniteCocycle, gamma: float, direction=None) -> FiniteCocycle:
    """Additive perturbation with cocycle_distance(base, result) = gamma."""
    if gamma < 0:
        raise InvalidParams("gamma must be >= 0")
    d = default_direction() if direction is None else np.asarray(direction)
    norm = operator_norm(d)
    if norm == 0:
        raise InvalidParams("zero perturbation direction")
    d = d / norm
    mats = base.matrices + gamma * d[None, :, :]
    try:
        return FiniteCocycle(mats, base.weights.copy())
    except SingularMatrix as exc:
        raise PerturbationLeavesGL(str(exc)) from exc


def perturb_weights(base: FiniteCocycle, gamma: float) -> FiniteCocycle:
    """Move total-variation mass gamma from the first atom toward the others."""
    if gamma < 0:
        raise InvalidParams("gamma must be >= 0")
    w = base.weights.copy()
    if len(w) < 2:
        raise InvalidParams("need at least two atoms to move weight")
    shift = gamma / 2.0
    w[0] -= shift
    w[1:] += shift / (len(w) - 1)
    if np.any(w < 0):
        raise InvalidParams("weight perturbation leaves the simplex")
    return FiniteCocycle(base.matrices.copy(), w)


@dataclass(frozen=True)
class SweepResult:
    """Rows ordered by the swept parameter, plus run metadata."""

    parameter: str
    columns: tuple[str, ...]
    rows: list[dict] = field(repr=False)
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        return [row[name] for row in self.rows]


def run_continuity_sweep(
    base: FiniteCocycle,
    gammas,
    n_steps: int,
    n_trials: int,
    seed: int,
    direction=None,
    mode: str = "matrices",
    n_workers: int = 1,
) -> SweepResult:
    """lambda_+/- estimates along a perturbation ray, final row gamma = 0.

    The same seed is used for every row (common random numbers), so the
    gamma = 0 row reproduces the base estimate exactly and the differences
    along the sweep are smooth in gamma.
    """
    gammas = [float(g) for g in gammas]
    if any(g < 0 for g in gammas):
        raise InvalidParams("gammas must be >= 0")
    if sorted(gammas, reverse=True) != gammas:
        raise InvalidParams("gammas must be sorted descending")
    if mode not in ("matrices", "weights", "both"):
        raise InvalidParams(f"unknown sweep mode {mode!r}")
    if gammas and gammas[-1] != 0.0:
        gammas = gammas + [0.0]
    rows = []
    for g in gammas:
        cocycle = base
        if mode in ("matrices", "both"):
            cocycle = perturb_matrices(cocycle, g, direction)
        if mode in ("weights", "both"):
            cocycle = perturb_weights(cocycle, g)
        est = estimate_extremal_mc(cocycle, n_steps, n_trials, seed, n_workers)
        rows.append(
            {
                "gamma": g,
                "distance": cocycle_distance(base, cocycle),
                "lambda_plus": est.lambda_plus,
                "stderr_plus": est.stderr_plus,
                "lambda_minus": est.lambda_minus,
                "stderr_minus": est.stderr_minus,
            }
        )
    rows.sort(key=lambda row: -row["gamma"])
    return SweepResult(
        parameter="gamma",
        columns=(
            "gamma",
            "distance",
            "lambda_plus",
            "stderr_plus",
            "lambda_minus",
            "stderr_minus",
        ),
        rows=rows,
        metadata={"n_steps": n_steps, "n_trials": n_trials, "seed": seed, "mode": mode},
    )


# fixed unit-norm offsets used to blow one atom up into a cluster
_JITTER_OFFSETS = [
    mat2(0.0, 1.0, 0.0, 0.0),
    mat2(0.0, 0.0, 1.0, 0.0),
    mat2(1.0, 0.0, 0.0, -1.0) / 1.0,
    mat2(0.0, 0.5, -1.0, 0.0),
    mat2(0.3, 0.0, 0.0, 1.0),
]


def run_support_jitter(
    base: FiniteCocycle,
    deltas,
    n_steps: int,
    n_trials: int,
    seed: int,
    split: int = 3,
    weight_split=None,
    n_workers: int = 1,
) -> SweepResult:
    """Replace each atom by a cluster within operator-norm distance delta.

    Every atom A_i becomes ``split`` atoms A_i + delta * U_j with fixed
    unit-norm offsets U_j (U_0 = 0 keeps the original atom), its weight
    divided among them by ``weight_split`` (uniform by default).
    """
    deltas = [float(d) for d in deltas]
    if any(d < 0 for d in deltas):
        raise InvalidParams("deltas must be >= 0")
    if not 1 <= split <= len(_JITTER_OFFSETS) + 1:
        raise InvalidParams(f"split must be in 1..{len(_JITTER_OFFSETS) + 1}")
    if weight_split is None:
        weight_split = np.full(split, 1.0 / split)
    else:
        weight_split = np.asarray(weight_split, dtype=np.float64)
        if weight_split.shape != (split,) or abs(weight_split.sum() - 1.0) > 1e-12:
            raise InvalidParams("weight_split must have `split` entries summing to 1")
    offsets = [np.zeros((2, 2), dtype=np.complex128)]
    for off in _JITTER_OFFSETS[: split - 1]:
        offsets.append(off / operator_norm(off))
    rows = []
    for delta in sorted(deltas, reverse=True):
        mats, weights = [], []
        for a, p in zip(base.matrices, base.weights):
            for off, frac in zip(offsets, weight_split):
                mats.append(a + delta * off)
                weights.append(p * frac)
        try:
            cocycle = FiniteCocycle(np.stack(mats), np.array(weights))
        except SingularMatrix as exc:
            raise PerturbationLeavesGL(str(exc)) from exc
        est = estimate_extremal_mc(cocycle, n_steps, n_trials, seed, n_workers)
        rows.append(
            {
                "delta": delta,
                "lambda_plus": est.lambda_plus,
                "stderr_plus": est.stderr_plus,
                "lambda_minus": est.lambda_minus,
                "stderr_minus": est.stderr_minus,
            }
        )
    return SweepResult(
        parameter="delta",
        columns=("delta", "lambda_plus", "stderr_plus", "lambda_minus", "stderr_minus"),
        rows=rows,
        metadata={
            "n_steps": n_steps,
            "n_trials": n_trials,
            "seed": seed,
            "split": split,
        },
    )
