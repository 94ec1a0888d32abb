"""Estimators and exact formulas for the extremal Lyapunov exponents."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cocycle import FiniteCocycle, _draw_symbols, substream, word_product
from .errors import BudgetExceeded, InvalidCocycle, NotDiagonal, UnnormalizedMeasure
from .projective import singular_values

__all__ = [
    "ExponentEstimate",
    "estimate_extremal_mc",
    "exact_diagonal",
    "enumeration_upper_bound",
    "furstenberg_integral",
]


@dataclass(frozen=True)
class ExponentEstimate:
    """Estimated extremal exponents with uncertainty and provenance."""

    lambda_plus: float
    lambda_minus: float
    stderr_plus: float
    stderr_minus: float
    n_steps: int
    n_trials: int
    method: str  # monte_carlo | exact_diagonal | furstenberg | enumeration_bound


def _trial_exponents(cocycle, n_steps: int, seed: int, trial: int):
    rng = substream(seed, trial)
    margin = getattr(cocycle, "margin", 0)
    symbols = _draw_symbols(cocycle.weights, n_steps + 2 * margin, rng)
    direction, acc, logdet = cocycle.product_along(symbols)
    log_s1 = acc + math.log(singular_values(direction)[0])
    # log sigma_2 = log|det| - log sigma_1; avoids underflow of the direction
    return log_s1 / n_steps, (logdet - log_s1) / n_steps


def estimate_extremal_mc(
    cocycle, n_steps: int, n_trials: int, seed: int, n_workers: int = 1
) -> ExponentEstimate:
    """Monte-Carlo estimate of lambda_+/- from independent renormalized products.

    Trial results are keyed by (seed, trial index) and merged in trial order,
    so the output does not depend on scheduling or worker count.
    """
    if n_steps < 1 or n_trials < 1:
        raise InvalidCocycle("n_steps and n_trials must be >= 1")
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            vals = list(
                pool.map(
                    lambda t: _trial_exponents(cocycle, n_steps, seed, t),
                    range(n_trials),
                )
            )
    else:
        vals = [_trial_exponents(cocycle, n_steps, seed, t) for t in range(n_trials)]
    plus = np.array([v[0] for v in vals])
    minus = np.array([v[1] for v in vals])

    def _stderr(x):
        if len(x) < 2:
            return 0.0
        return float(np.std(x, ddof=1) / math.sqrt(len(x)))

    return ExponentEstimate(
        lambda_plus=float(plus.mean()),
        lambda_minus=float(minus.mean()),
        stderr_plus=_stderr(plus),
        stderr_minus=_stderr(minus),
        n_steps=n_steps,
        n_trials=n_trials,
        method="monte_carlo",
    )


def exact_diagonal(cocycle: FiniteCocycle, tol: float = 1e-12) -> ExponentEstimate:
    """Exact exponents for simultaneously diagonal cocycles.

    lambda_+ = max(s_a, s_d) and lambda_- = min(s_a, s_d), where s_a and s_d
    are the weighted means of log|top-left| and log|bottom-right| entries.
    """
    mats = cocycle.matrices
    for i, m in enumerate(mats):
        scale = max(1.0, float(np.max(np.abs(m))))
        if abs(m[0, 1]) + abs(m[1, 0]) > tol * scale:
            raise NotDiagonal(f"matrix {i} has off-diagonal mass above tolerance")
    s_a = float(np.dot(cocycle.weights, np.log(np.abs(mats[:, 0, 0]))))
    s_d = float(np.dot(cocycle.weights, np.log(np.abs(mats[:, 1, 1]))))
    return ExponentEstimate(
        lambda_plus=max(s_a, s_d),
        lambda_minus=min(s_a, s_d),
        stderr_plus=0.0,
        stderr_minus=0.0,
        n_steps=0,
        n_trials=0,
        method="exact_diagonal",
    )


def enumeration_upper_bound(
    cocycle: FiniteCocycle, n: int, budget: int = 20_000_000
) -> float:
    """Exact c_n = (1/n) * sum over words w of p(w) log||A_w|| by DFS.

    Prefix products are shared along the tree; renormalization keeps the
    running matrix at unit operator norm.  (c_n) is subadditive and its
    infimum is lambda_+, so every c_n is an upper bound.
    """
    if not isinstance(cocycle, FiniteCocycle):
        raise InvalidCocycle("enumeration requires a single-coordinate cocycle")
    if n < 1:
        raise InvalidCocycle("n must be >= 1")
    m = cocycle.alphabet
    if m**n > budget:
        raise BudgetExceeded(f"{m}^{n} words exceed budget {budget}")
    mats = cocycle.matrices
    logw = np.log(np.where(cocycle.weights > 0, cocycle.weights, 1.0))
    alive = cocycle.weights > 0
    total = 0.0

    def visit(depth, prefix, acc, logp):
        nonlocal total
        if depth == n:
            s1, _ = singular_values(prefix)
            total += math.exp(logp) * (acc + math.log(s1))
            return
        for i in range(m):
            if not alive[i]:
                continue
            nxt = mats[i] @ prefix
            s1, _ = singular_values(nxt)
            visit(depth + 1, nxt / s1, acc + math.log(s1), logp + logw[i])

    visit(0, np.eye(2, dtype=np.complex128), 0.0, 0.0)
    return total / n


def furstenberg_integral(cocycle: FiniteCocycle, eta) -> float:
    """Integral of log||A(x) v|| / ||v|| against weights x atoms of eta."""
    weights = np.asarray(eta.weights, dtype=np.float64)
    if abs(float(weights.sum()) - 1.0) > 1e-10:
        raise UnnormalizedMeasure("particle measure must have total mass 1")
    pts = np.asarray(eta.points, dtype=np.complex128)  # (N, 2), unit rows
    total = 0.0
    for p, a in zip(cocycle.weights, cocycle.matrices):
        if p == 0.0:
            continue
        imgs = pts @ a.T
        norms = np.sqrt(np.sum(np.abs(imgs) ** 2, axis=1))
        total += p * float(np.dot(weights, np.log(norms)))
    return total
