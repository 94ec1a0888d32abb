"""Stationary measures on P(C^2) as weighted particle clouds.

The transfer operator pushes every particle through every generator; a
stationary measure is a fixed point.  Because stationary measures here are
often singular (Dirac or Cantor-like), measures are particle clouds rather
than grids.  The stationarity defect is measured against a fixed dictionary
of 64 smooth test functions, a computable weak* surrogate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import FiniteCocycle, _draw_symbols, substream
from .errors import NotConverged, UnnormalizedMeasure
from .projective import ProjPoint

__all__ = [
    "ParticleMeasure",
    "UStateSample",
    "transfer_step",
    "residual",
    "solve_stationary",
    "ustate_backward_sample",
    "directional_mass",
    "angular_dispersion",
    "save_measure",
    "load_measure",
]

_PHASE_TOL = 1e-12


def canonicalize_points(points: np.ndarray) -> np.ndarray:
    """Row-wise unit norm + canonical phase (vectorized ProjPoint rule)."""
    pts = np.asarray(points, dtype=np.complex128).copy()
    norms = np.sqrt(np.sum(np.abs(pts) ** 2, axis=1))
    pts /= norms[:, None]
    lead = np.where(np.abs(pts[:, 0]) > _PHASE_TOL, pts[:, 0], pts[:, 1])
    pts *= (np.abs(lead) / lead)[:, None]
    return pts


@dataclass(frozen=True)
class ParticleMeasure:
    """Weighted point cloud on the projective line; total mass 1."""

    points: np.ndarray = field(repr=False)  # (N, 2) complex128, canonical rows
    weights: np.ndarray = field(repr=False)  # (N,) float64

    def __post_init__(self):
        pts = canonicalize_points(self.points)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size != pts.shape[0]:
            raise UnnormalizedMeasure("points / weights length mismatch")
        if np.any(w < 0):
            raise UnnormalizedMeasure("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise UnnormalizedMeasure(f"total mass {w.sum()!r} != 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.points.shape[0]

    @classmethod
    def dirac(cls, point: ProjPoint) -> "ParticleMeasure":
        return cls(point.as_vector()[None, :], np.array([1.0]))

    @classmethod
    def spread(cls, n: int) -> "ParticleMeasure":
        """Deterministic quasi-uniform cloud (Fibonacci sphere pullback)."""
        sphere = _fibonacci_sphere(n)
        return cls(_sphere_to_proj(sphere), np.full(n, 1.0 / n))

    def sphere_coordinates(self) -> np.ndarray:
        """(N, 3) image under the standard identification P(C^2) ~ S^2."""
        z1, z2 = self.points[:, 0], self.points[:, 1]
        w = z1 * np.conj(z2)
        return np.stack(
            [2.0 * w.real, 2.0 * w.imag, np.abs(z1) ** 2 - np.abs(z2) ** 2], axis=1
        )


def _fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.float64)
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = 2.0 * math.pi * i / golden
    rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([rad * np.cos(theta), rad * np.sin(theta), z], axis=1)


def _sphere_to_proj(sphere: np.ndarray) -> np.ndarray:
    """Inverse of `sphere_coordinates` (one representative per point)."""
    n1, n2, n3 = sphere[:, 0], sphere[:, 1], sphere[:, 2]
    z2 = np.sqrt(np.maximum(0.0, (1.0 - n3) / 2.0))
    pts = np.empty((sphere.shape[0], 2), dtype=np.complex128)
    ok = z2 > _PHASE_TOL
    pts[ok, 0] = (n1[ok] + 1j * n2[ok]) / (2.0 * z2[ok])
    pts[ok, 1] = z2[ok]
    pts[~ok, 0] = 1.0
    pts[~ok, 1] = 0.0
    return pts


def _systematic_resample(points, weights, n: int, rng) -> np.ndarray:
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    offsets = (rng.random() + np.arange(n)) / n
    idx = np.searchsorted(cum, offsets, side="right")
    return points[np.minimum(idx, len(weights) - 1)]


def transfer_step(
    cocycle: FiniteCocycle,
    eta: ParticleMeasure,
    resample_to: int | None = None,
    rng=None,
) -> ParticleMeasure:
    """One application of the push-forward operator eta -> sum p_i (A_i)_* eta.

    Without resampling the output has alphabet * N particles and exactly
    conserved mass; with ``resample_to`` the cloud is reduced back to the
    budget by seeded systematic resampling.
    """
    clouds, weights = [], []
    for p, a in zip(cocycle.weights, cocycle.matrices):
        if p == 0.0:
            continue
        clouds.append(eta.points @ a.T)
        weights.append(p * eta.weights)
    pts = np.concatenate(clouds, axis=0)
    w = np.concatenate(weights)
    w = w / w.sum()  # exact mass 1 despite rounding
    if resample_to is not None:
        if rng is None:
            raise ValueError("resampling requires an explicit rng")
        pts = _systematic_resample(canonicalize_points(pts), w, resample_to, rng)
        w = np.full(resample_to, 1.0 / resample_to)
    return ParticleMeasure(pts, w)


# ---------------------------------------------------------------------------
# residual: fixed, versioned dictionary of 64 test functions on P(C^2)

_DICT_VERSION = 1
_N_HARMONICS = 9
_N_BUMPS = 55
_BUMP_SCALE = 0.6
_BUMP_CENTERS = _fibonacci_sphere(_N_BUMPS)


def _dictionary_features(sphere: np.ndarray) -> np.ndarray:
    """(N, 64) evaluations; every function is bounded by 1 on the sphere."""
    n1, n2, n3 = sphere[:, 0], sphere[:, 1], sphere[:, 2]
    harmonics = np.stack(
        [
            n1,
            n2,
            n3,
            n1 * n2,
            n1 * n3,
            n2 * n3,
            0.5 * (n1 * n1 - n2 * n2),
            0.5 * (3.0 * n3 * n3 - 1.0),
            n1 * n2 * n3,
        ],
        axis=1,
    )
    d2 = np.sum((sphere[:, None, :] - _BUMP_CENTERS[None, :, :]) ** 2, axis=2)
    bumps = np.exp(-d2 / (2.0 * _BUMP_SCALE**2))
    return np.concatenate([harmonics, bumps], axis=1)


def _integrals(eta: ParticleMeasure) -> np.ndarray:
    return eta.weights @ _dictionary_features(eta.sphere_coordinates())


def residual(cocycle: FiniteCocycle, eta: ParticleMeasure) -> float:
    """Stationarity defect: max dictionary-integral gap between eta and T(eta)."""
    pushed = transfer_step(cocycle, eta)
    return float(np.max(np.abs(_integrals(eta) - _integrals(pushed))))


def solve_stationary(
    cocycle: FiniteCocycle,
    particle_budget: int = 10_000,
    max_iters: int = 200,
    tol: float = 1e-2,
    seed: int = 0,
):
    """Fixed point of the transfer operator by iteration with tail averaging.

    Iterates a spread-out cloud and maintains a Cesaro average over
    geometrically growing windows (plain iteration oscillates when the fixed
    point is not unique, e.g. for diagonal cocycles; window averages still
    settle).  Returns (measure, residual); raises NotConverged, carrying the
    best iterate, if the residual never reaches ``tol``.
    """
    if particle_budget < 100:
        raise ValueError("particle_budget must be >= 100")
    eta = ParticleMeasure.spread(particle_budget)
    avg = eta
    window = 1
    next_reset = 2
    best = (math.inf, avg)
    for t in range(1, max_iters + 1):
        rng = substream(seed, t)
        eta = transfer_step(cocycle, eta, resample_to=particle_budget, rng=rng)
        if t == next_reset:
            avg, window = eta, 1
            next_reset *= 2
        else:
            mix_pts = np.concatenate([avg.points, eta.points])
            mix_w = np.concatenate(
                [
                    avg.weights * (window / (window + 1.0)),
                    eta.weights / (window + 1.0),
                ]
            )
            pts = _systematic_resample(mix_pts, mix_w, particle_budget, rng)
            avg = ParticleMeasure(pts, np.full(particle_budget, 1.0 / particle_budget))
            window += 1
        r = residual(cocycle, avg)
        if r < best[0]:
            best = (r, avg)
        if r <= tol:
            return avg, r
    raise NotConverged(
        f"residual {best[0]:.3g} above tol {tol:g} after {max_iters} iterations",
        measure=best[1],
        residual=best[0],
    )


# ---------------------------------------------------------------------------
# backward-iteration u-state sampler

@dataclass(frozen=True)
class UStateSample:
    """Image of the seed direction under the product of a sampled past word."""

    past_word: np.ndarray = field(repr=False)  # symbols x_{-depth}..x_{-1}
    point: ProjPoint
    depth: int


_DEFAULT_SEED_POINT = ProjPoint(1.0, 1.0)


def ustate_backward_sample(
    cocycle: FiniteCocycle,
    depth: int,
    n_samples: int,
    seed: int,
    seed_point: ProjPoint = _DEFAULT_SEED_POINT,
) -> list[UStateSample]:
    """Sample the martingale limit: push a fixed direction through i.i.d. pasts.

    Each sample draws a past word (x_{-depth}, ..., x_{-1}) and applies
    A_{x_{-1}} ... A_{x_{-depth}} to the seed point.  When lambda_+ > lambda_-
    the empirical point distribution approximates the unstable-state
    projection; with zero gap (e.g. rotation cocycles) it stays dispersed,
    which `angular_dispersion` detects.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    out = []
    v0 = seed_point.as_vector()
    for i in range(n_samples):
        rng = substream(seed, i)
        word = _draw_symbols(cocycle.weights, depth, rng)
        direction, _, _ = cocycle.product_along(word)
        out.append(
            UStateSample(
                past_word=word,
                point=ProjPoint.from_vector(direction @ v0),
                depth=depth,
            )
        )
    return out


def angular_dispersion(points: np.ndarray, weights=None) -> float:
    """Eigenvalue ratio of the second-moment matrix, in [0, 1].

    0 for a Dirac cloud, 1 for the rotation-invariant measure.
    """
    pts = canonicalize_points(np.asarray(points, dtype=np.complex128))
    if weights is None:
        weights = np.full(pts.shape[0], 1.0 / pts.shape[0])
    second = (pts * weights[:, None]).conj().T @ pts
    eig = np.linalg.eigvalsh(second)
    return float(eig[0] / eig[1]) if eig[1] > 0 else 1.0


def directional_mass(eta: ParticleMeasure, direction: ProjPoint, eps: float) -> float:
    """Total weight of particles within projective angle eps of the direction."""
    inner = np.abs(eta.points @ np.conj(direction.as_vector()))
    angles = np.arccos(np.clip(inner, 0.0, 1.0))
    return float(eta.weights[angles <= eps].sum())


# ---------------------------------------------------------------------------
# measure dump format (text; consumed by the CLI plot emitter)

def save_measure(eta: ParticleMeasure, path, residual_value: float, provenance: str):
    """Text table of (z1 re, z1 im, z2 re, z2 im, weight) rows with a header."""
    with open(path, "w", newline="\n") as fh:
        fh.write("# cocyclelab measure dump v1\n")
        fh.write(f"# residual = {residual_value:.17g}\n")
        fh.write(f"# provenance = {provenance}\n")
        fh.write("# columns: z1_re z1_im z2_re z2_im weight\n")
        for (z1, z2), w in zip(eta.points, eta.weights):
            fh.write(
                f"{z1.real:.17g} {z1.imag:.17g} {z2.real:.17g} {z2.imag:.17g} "
                f"{w:.17g}\n"
            )


def load_measure(path) -> tuple[ParticleMeasure, float]:
    """Read a measure dump; returns (measure, residual from the header)."""
    res = math.nan
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                if line.startswith("# residual"):
                    res = float(line.split("=", 1)[1])
                continue
            if line:
                rows.append([float(tok) for tok in line.split()])
    arr = np.array(rows)
    pts = arr[:, 0] + 1j * arr[:, 1], arr[:, 2] + 1j * arr[:, 3]
    return ParticleMeasure(np.stack(pts, axis=1), arr[:, 4]), res
