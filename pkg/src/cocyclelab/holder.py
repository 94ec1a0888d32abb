"""The explicit Hoelder-small, exponent-killing perturbation over the 2-shift.

The unperturbed cocycle is diagonal: symbol 0 maps to diag(sigma, 1/sigma)
and symbol 1 to diag(1/sigma, sigma).  The perturbed cocycle multiplies in a
shear of size eps = sigma^(-k) on the cylinder Z (symbol pattern
1^k 0^(k+1) at coordinates 0..2k) and on its 2k-th forward image, and a
rotation by arctan(eps) on its k-th forward image.  Along an orbit through
Z the product swaps the horizontal and vertical axes, which forces the
Lyapunov exponents of the perturbed cocycle to vanish, while the distance
to the diagonal cocycle is small both uniformly and in Hoelder norm
whenever 2^(2r) < sigma.

Also houses the degenerate-weight family diag(sigma, 1/sigma) / rotation
by pi/2, whose exponents vanish for all interior weights but equal
+-log(sigma) at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import (
    FiniteCocycle,
    PathSample,
    WindowCocycle,
    _draw_symbols,
    as_window,
    substream,
    window_eval,
)
from .errors import (
    BudgetExceeded,
    InsufficientReturns,
    InvalidParams,
    WordNotInCylinder,
)
from .exponents import ExponentEstimate, estimate_extremal_mc
from .projective import (
    HORIZONTAL,
    VERTICAL,
    ProjPoint,
    angle_between,
    mat2,
    operator_norm,
    singular_values,
)

__all__ = [
    "HolderConstruction",
    "ShiftMetricParams",
    "WindowTable",
    "HolderSeminorm",
    "build_construction",
    "verify_subspace_swap",
    "holder_seminorm",
    "perturbation_difference",
    "holder_bound",
    "vanishing_exponent_check",
    "induced_return_experiment",
    "kifer_family",
]

_SEMINORM_BUDGET = 2_000_000


@dataclass(frozen=True)
class ShiftMetricParams:
    """Dyadic shift metric d(x, y) = 2^(-first disagreement radius), exponent r."""

    exponent: float
    base: int = 2

    def __post_init__(self):
        if self.exponent <= 0:
            raise InvalidParams("Hoelder exponent must be > 0")
        if self.base != 2:
            raise InvalidParams("only the dyadic metric is supported")

    def in_discontinuity_regime(self, sigma: float) -> bool:
        """True iff 2^(2r) < sigma, the regime where the perturbation is small."""
        return 2.0 ** (2.0 * self.exponent) < sigma


@dataclass(frozen=True)
class HolderConstruction:
    sigma: float
    k: int
    n: int
    eps: float  # sigma^(-k)
    delta: float  # arctan(eps)
    weights: np.ndarray
    cylinder_word: np.ndarray = field(repr=False)  # symbols at coords 0..n-1
    cocycle: WindowCocycle = field(repr=False)  # the perturbed cocycle
    unperturbed: FiniteCocycle = field(repr=False)

    @property
    def unperturbed_lambda_plus(self) -> float:
        p1, p2 = self.weights
        return abs(p1 - p2) * math.log(self.sigma)

    @property
    def cylinder_measure(self) -> float:
        p1, p2 = self.weights
        return p2**self.k * p1 ** (self.k + 1)


def _diag_pair(sigma: float) -> np.ndarray:
    return np.stack(
        [mat2(sigma, 0, 0, 1.0 / sigma), mat2(1.0 / sigma, 0, 0, sigma)]
    )


def build_construction(sigma: float, k: int, weights) -> HolderConstruction:
    """Tabulate the perturbed cocycle over all window words of radius 2k."""
    if not sigma > 1.0:
        raise InvalidParams("sigma must be > 1")
    if k < 1:
        raise InvalidParams("k must be >= 1")
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (2,) or np.any(weights <= 0):
        raise InvalidParams("weights must be two positive numbers")
    n = 2 * k + 1
    eps = sigma ** (-k)
    delta = math.atan(eps)
    shear = mat2(1.0, 0.0, eps, 1.0)
    rot = mat2(math.cos(delta), -math.sin(delta), math.sin(delta), math.cos(delta))
    diag = _diag_pair(sigma)
    # symbol pattern of the cylinder: k copies of symbol 1 then k+1 of symbol 0
    z_word = np.array([1] * k + [0] * (k + 1), dtype=np.int64)

    radius = 2 * k
    width = 2 * radius + 1
    size = 2**width
    table = np.empty((size, 2, 2), dtype=np.complex128)
    digits = np.empty(width, dtype=np.int64)
    for code in range(size):
        c = code
        for j in range(width - 1, -1, -1):
            digits[j] = c & 1
            c >>= 1
        # coordinate i of the path is digit index i + 2k
        a = diag[digits[radius]]
        if np.array_equal(digits[radius : radius + n], z_word):  # x in Z
            table[code] = a @ shear
        elif np.array_equal(digits[k : k + n], z_word):  # x in f^k(Z)
            table[code] = a @ rot
        elif np.array_equal(digits[0:n], z_word):  # x in f^(2k)(Z)
            table[code] = a @ shear
        else:
            table[code] = a
    return HolderConstruction(
        sigma=sigma,
        k=k,
        n=n,
        eps=eps,
        delta=delta,
        weights=weights,
        cylinder_word=z_word,
        cocycle=WindowCocycle(2, radius, table, weights),
        unperturbed=FiniteCocycle(diag, weights),
    )


def verify_subspace_swap(
    c: HolderConstruction, word=None, tol: float = 1e-10
) -> dict[str, bool]:
    """Check the axis-swap identities along an orbit through the cylinder.

    ``word`` gives path coordinates -2k..4k (length 6k+1) and must contain
    the cylinder pattern at coordinates 0..n-1; by default the extension is
    all symbol 0.  Checks, by exact product evaluation: after k steps the
    horizontal axis lands on span(eps, 1); after k+1 and 2k steps on the
    vertical axis; after n steps horizontal and vertical have swapped.
    """
    k, n = c.k, c.n
    if word is None:
        word = np.zeros(6 * k + 1, dtype=np.int64)
        word[2 * k : 4 * k + 1] = c.cylinder_word
    else:
        word = np.asarray(word, dtype=np.int64)
        if word.shape != (6 * k + 1,):
            raise WordNotInCylinder(f"word must have length {6 * k + 1}")
        if not np.array_equal(word[2 * k : 4 * k + 1], c.cylinder_word):
            raise WordNotInCylinder("coordinates 0..n-1 must spell the cylinder word")
    path = PathSample(seed=0, symbols=word)
    prod = np.eye(2, dtype=np.complex128)
    stage_products = {}
    for j in range(n):
        prod = window_eval(c.cocycle, path, 2 * k + j) @ prod
        stage_products[j + 1] = prod.copy()

    def _image(mat, point):
        return ProjPoint.from_vector(mat @ point.as_vector())

    tilted = ProjPoint(c.eps, 1.0)
    return {
        "k_horizontal_tilted": angle_between(_image(stage_products[k], HORIZONTAL), tilted) <= tol,
        "k+1_horizontal_vertical": angle_between(_image(stage_products[k + 1], HORIZONTAL), VERTICAL) <= tol,
        "2k_horizontal_vertical": angle_between(_image(stage_products[2 * k], HORIZONTAL), VERTICAL) <= tol,
        "n_horizontal_vertical": angle_between(_image(stage_products[n], HORIZONTAL), VERTICAL) <= tol,
        "n_vertical_horizontal": angle_between(_image(stage_products[n], VERTICAL), HORIZONTAL) <= tol,
    }


# ---------------------------------------------------------------------------
# exact Hoelder seminorm for cylinder-constant matrix functions

@dataclass(frozen=True)
class WindowTable:
    """A matrix-valued function constant on window cylinders (not necessarily
    invertible, e.g. a difference of two cocycles)."""

    alphabet: int
    radius: int
    table: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class HolderSeminorm:
    sup_term: float
    quotient_term: float

    @property
    def total(self) -> float:
        return self.sup_term + self.quotient_term


def perturbation_difference(c: HolderConstruction) -> WindowTable:
    """B_n - A as a window table (radius 2k)."""
    base = as_window(c.unperturbed, c.cocycle.radius)
    return WindowTable(
        alphabet=2,
        radius=c.cocycle.radius,
        table=c.cocycle.table - base.table,
    )


def holder_seminorm(L: WindowTable, params: ShiftMetricParams) -> HolderSeminorm:
    """Exact sup + Hoelder-quotient seminorm of a cylinder-constant function.

    The quotient sup over pairs of points is attained on pairs of window
    cylinders: group words by their central core of radius N and take the
    within-group diameter, scaled by 2^(rN); pairs of points agreeing on the
    whole window have equal values and contribute nothing.
    """
    m, radius = L.alphabet, L.radius
    width = 2 * radius + 1
    size = m**width
    if size > _SEMINORM_BUDGET:
        raise BudgetExceeded(f"{m}^{width} window words exceed the seminorm budget")

    # dedup values: the table typically takes very few distinct values
    ids = np.empty(size, dtype=np.int64)
    values = []
    seen: dict[bytes, int] = {}
    for code in range(size):
        key = L.table[code].tobytes()
        vid = seen.setdefault(key, len(values))
        if vid == len(values):
            values.append(L.table[code])
        ids[code] = vid
    sup_term = max(operator_norm(v) for v in values)

    pair_cache: dict[tuple[int, int], float] = {}

    def pair_dist(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in pair_cache:
            pair_cache[key] = operator_norm(values[key[0]] - values[key[1]])
        return pair_cache[key]

    codes = np.arange(size)
    r = params.exponent
    quotient_term = 0.0
    for big_n in range(radius + 1):
        if big_n == 0:
            cores = np.zeros(size, dtype=np.int64)
        else:
            cores = (codes // m ** (radius - big_n + 1)) % m ** (2 * big_n - 1)
        groups: dict[int, set[int]] = {}
        for code in range(size):
            groups.setdefault(int(cores[code]), set()).add(int(ids[code]))
        diameter = 0.0
        for vids in groups.values():
            vlist = sorted(vids)
            for a in range(len(vlist)):
                for b in range(a + 1, len(vlist)):
                    d = pair_dist(vlist[a], vlist[b])
                    if d > diameter:
                        diameter = d
        quotient_term = max(quotient_term, 2.0 ** (r * big_n) * diameter)
    return HolderSeminorm(sup_term=sup_term, quotient_term=quotient_term)


def holder_bound(sigma: float, r: float, k: int) -> float:
    """The proven bound 3 sigma (2^(2r)/sigma)^k on the perturbation seminorm."""
    return 3.0 * sigma * (2.0 ** (2.0 * r) / sigma) ** k


def vanishing_exponent_check(
    c: HolderConstruction, n_steps: int, n_trials: int, seed: int, n_workers: int = 1
) -> ExponentEstimate:
    """Monte-Carlo exponents of the perturbed cocycle (expected near zero)."""
    return estimate_extremal_mc(c.cocycle, n_steps, n_trials, seed, n_workers)


def induced_return_experiment(
    c: HolderConstruction,
    n_steps: int,
    seed: int,
    min_returns: int = 100,
    perturbed: bool = True,
) -> tuple[float, float]:
    """First-return statistics to the cylinder along one sampled path.

    Returns (mean return time, lambda_+ estimate of the induced cocycle):
    the accumulated log growth between the first and last visit divided by
    the number of completed returns.  With ``perturbed=False`` the product
    is taken along the diagonal cocycle instead, so the induced exponent
    should match lambda_+ times the mean return time.
    """
    k, n = c.k, c.n
    margin = 2 * k
    rng = substream(seed)
    symbols = _draw_symbols(c.weights, n_steps + 2 * margin, rng)
    inner = symbols[margin : margin + n_steps]
    if n_steps < n:
        raise InsufficientReturns("path shorter than the cylinder word")
    windows = np.lib.stride_tricks.sliding_window_view(inner, n)
    visits = np.flatnonzero(np.all(windows == c.cylinder_word, axis=1))
    if len(visits) < min_returns + 1:
        raise InsufficientReturns(
            f"observed {max(len(visits) - 1, 0)} returns, need {min_returns}"
        )
    first, last = int(visits[0]), int(visits[-1])
    n_returns = len(visits) - 1
    # product over coordinates first..last-1 of the sampled path
    if perturbed:
        segment = symbols[first : last + 2 * margin]
        direction, acc, _ = c.cocycle.product_along(segment)
    else:
        direction, acc, _ = c.unperturbed.product_along(inner[first:last])
    s1, _ = singular_values(direction)
    induced_lambda = (acc + math.log(s1)) / n_returns
    mean_return = (last - first) / n_returns
    return mean_return, induced_lambda


def kifer_family(sigma: float, p1: float) -> FiniteCocycle:
    """diag(sigma, 1/sigma) and the quarter rotation, weights (p1, 1 - p1)."""
    if not sigma > 1.0:
        raise InvalidParams("sigma must be > 1")
    if not 0.0 <= p1 <= 1.0:
        raise InvalidParams("p1 must lie in [0, 1]")
    mats = np.stack([mat2(sigma, 0, 0, 1.0 / sigma), mat2(0, -1.0, 1.0, 0)])
    return FiniteCocycle(mats, np.array([p1, 1.0 - p1]))
