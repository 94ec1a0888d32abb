"""Finite-depth estimates of the unstable/stable directions.

The unstable direction at a point depends only on the past word and is the
top left-singular direction of the backward product; the stable direction
depends only on the future word and is the most-contracted right-singular
direction of the forward product.  For a single hyperbolic matrix both
converge to the eigendirections as depth grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import _draw_symbols, substream, word_product
from .errors import AlphabetMismatch, DegenerateGap
from .projective import ProjPoint, angle_between, singular_values

__all__ = [
    "OseledetsFrame",
    "estimate_unstable",
    "estimate_stable",
    "estimate_frame",
    "AngleConvergenceResult",
    "angle_convergence_experiment",
]

_GAP_TOL = 1e-6


@dataclass(frozen=True)
class OseledetsFrame:
    unstable: ProjPoint
    stable: ProjPoint
    depth: int
    gap_estimate: float  # per-step proxy for lambda_+ - lambda_-


def _hermitian_top_eigvec(h: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(h)
    return vecs[:, -1]  # eigh sorts ascending


def _hermitian_bottom_eigvec(h: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(h)
    return vecs[:, 0]


def _log_gap_or_raise(direction: np.ndarray, acc: float, logdet: float) -> float:
    """log(sigma_1 / sigma_2) of the full product, via the determinant.

    sigma_2 of the renormalized direction underflows for deep hyperbolic
    products, so the gap is computed as 2 log sigma_1 - log|det|.
    """
    log_s1 = acc + math.log(singular_values(direction)[0])
    log_gap = 2.0 * log_s1 - logdet
    if log_gap < math.log1p(_GAP_TOL):
        raise DegenerateGap(
            f"singular value log-ratio {log_gap:.3g} does not resolve a direction"
        )
    return log_gap


def estimate_unstable(cocycle, past_word) -> ProjPoint:
    """Top image direction of the backward product over the past word.

    ``past_word`` lists x_{-n}..x_{-1}; the product applied is
    A_{x_{-1}} ... A_{x_{-n}}.
    """
    direction, acc, logdet = word_product(cocycle, past_word)
    _log_gap_or_raise(direction, acc, logdet)
    u = _hermitian_top_eigvec(direction @ direction.conj().T)
    return ProjPoint.from_vector(u)


def estimate_stable(cocycle, future_word) -> ProjPoint:
    """Most-contracted (right singular) direction of the forward product.

    ``future_word`` lists x_0..x_{n-1}; the product is A_{x_{n-1}} ... A_{x_0}.
    """
    direction, acc, logdet = word_product(cocycle, future_word)
    _log_gap_or_raise(direction, acc, logdet)
    v = _hermitian_bottom_eigvec(direction.conj().T @ direction)
    return ProjPoint.from_vector(v)


def estimate_frame(cocycle, past_word, future_word) -> OseledetsFrame:
    """Both directions plus a per-step gap proxy from the backward product."""
    direction, acc, logdet = word_product(cocycle, past_word)
    log_gap = _log_gap_or_raise(direction, acc, logdet)
    unstable = ProjPoint.from_vector(
        _hermitian_top_eigvec(direction @ direction.conj().T)
    )
    depth = len(past_word)
    return OseledetsFrame(
        unstable=unstable,
        stable=estimate_stable(cocycle, future_word),
        depth=depth,
        gap_estimate=log_gap / depth,
    )


@dataclass(frozen=True)
class AngleConvergenceResult:
    fraction: float  # of valid points satisfying both angle conditions
    n_valid: int
    n_excluded: int  # degenerate-gap exclusions, reported separately
    eps: float
    depth: int


def angle_convergence_experiment(
    a, b, eps: float, depth: int, n_points: int, seed: int
) -> AngleConvergenceResult:
    """Fraction of sampled words whose A- and B-frames agree within eps.

    Each sampled point uses one past and one future word of the given depth;
    both cocycles are evaluated on the same words.
    """
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("cocycles have different alphabet sizes")
    good = valid = excluded = 0
    for i in range(n_points):
        rng = substream(seed, i)
        past = _draw_symbols(a.weights, depth, rng)
        future = _draw_symbols(a.weights, depth, rng)
        try:
            eu_a = estimate_unstable(a, past)
            eu_b = estimate_unstable(b, past)
            es_a = estimate_stable(a, future)
            es_b = estimate_stable(b, future)
        except DegenerateGap:
            excluded += 1
            continue
        valid += 1
        if angle_between(eu_a, eu_b) < eps and angle_between(es_a, es_b) < eps:
            good += 1
    fraction = good / valid if valid else 0.0
    return AngleConvergenceResult(
        fraction=fraction,
        n_valid=valid,
        n_excluded=excluded,
        eps=eps,
        depth=depth,
    )
