"""Locally constant cocycles over Bernoulli shifts.

Two representations:

* :class:`FiniteCocycle` -- the generator depends on the zeroth coordinate
  only: matrices A_0..A_{m-1} with a probability vector.
* :class:`WindowCocycle` -- the generator depends on coordinates
  -w..+w of the path; values are tabulated over all m^(2w+1) window words.

Symbols are 0-based indices into the matrix list.  Window words are read
leftmost coordinate first and encoded as base-m integers (leftmost digit
most significant) for O(1) table lookup.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import (
    AlphabetMismatch,
    InvalidCocycle,
    OutOfRange,
    SingularMatrix,
)
from .projective import operator_norm

__all__ = [
    "FiniteCocycle",
    "WindowCocycle",
    "PathSample",
    "substream",
    "sample_path",
    "word_product",
    "cocycle_distance",
    "weight_distance",
    "scalar_split",
    "window_eval",
    "window_distance",
    "cocycle_from_dict",
    "cocycle_to_dict",
]

_WEIGHT_TOL = 1e-12


def substream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic RNG stream for (seed, key...), independent of scheduling."""
    return np.random.default_rng([int(seed) & (2**64 - 1), *[int(k) for k in key]])


def _check_weights(weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 1:
        raise InvalidCocycle("weights must be a non-empty vector")
    if np.any(w < 0):
        raise InvalidCocycle("weights must be nonnegative")
    if abs(float(w.sum()) - 1.0) > _WEIGHT_TOL:
        raise InvalidCocycle(f"weights sum to {w.sum()!r}, expected 1")
    return w


def _check_invertible(mats: np.ndarray) -> None:
    for i, m in enumerate(mats):
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if not np.all(np.isfinite(m.view(np.float64))):
            raise InvalidCocycle(f"matrix {i} has non-finite entries")
        if abs(det) == 0.0:
            raise SingularMatrix(f"matrix {i} is singular")


@dataclass(frozen=True)
class FiniteCocycle:
    """Matrices A_0..A_{m-1} with probability weights (the pair (A, p))."""

    matrices: np.ndarray  # (m, 2, 2) complex128
    weights: np.ndarray  # (m,) float64

    def __post_init__(self):
        mats = np.ascontiguousarray(self.matrices, dtype=np.complex128)
        if mats.ndim != 3 or mats.shape[1:] != (2, 2):
            raise InvalidCocycle("matrices must have shape (m, 2, 2)")
        w = _check_weights(self.weights)
        if w.size != mats.shape[0]:
            raise InvalidCocycle("weights / matrices length mismatch")
        _check_invertible(mats)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "weights", w)

    @property
    def alphabet(self) -> int:
        return self.matrices.shape[0]

    #: margin of path symbols needed on each side of a product range
    margin = 0

    def product_along(self, symbols: np.ndarray):
        """Renormalized product over the symbol array; see `word_product`."""
        return _kernels.product_log_norm(
            self.matrices, np.ascontiguousarray(symbols, dtype=np.int64)
        )


@dataclass(frozen=True)
class WindowCocycle:
    """Cocycle depending on path coordinates -radius..+radius."""

    alphabet: int
    radius: int
    table: np.ndarray  # (alphabet**(2*radius+1), 2, 2) complex128
    weights: np.ndarray

    def __post_init__(self):
        table = np.ascontiguousarray(self.table, dtype=np.complex128)
        w = _check_weights(self.weights)
        if w.size != self.alphabet:
            raise InvalidCocycle("weights length must equal alphabet size")
        if self.radius < 0:
            raise InvalidCocycle("radius must be >= 0")
        if table.shape != (self.alphabet ** self.width, 2, 2):
            raise InvalidCocycle("table must be total over all window words")
        _check_invertible(table)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "weights", w)

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    @property
    def margin(self) -> int:
        return self.radius

    def word_index(self, word) -> int:
        """Base-m code of a window word (leftmost coordinate first)."""
        if len(word) != self.width:
            raise OutOfRange(f"window word must have length {self.width}")
        code = 0
        for s in word:
            if not 0 <= s < self.alphabet:
                raise OutOfRange(f"symbol {s} outside alphabet")
            code = code * self.alphabet + int(s)
        return code

    def product_along(self, symbols: np.ndarray):
        """Renormalized product over positions radius..len-1-radius."""
        return _kernels.window_product_log_norm(
            self.table,
            np.ascontiguousarray(symbols, dtype=np.int64),
            self.radius,
            self.alphabet,
        )


@dataclass(frozen=True)
class PathSample:
    """A finite stretch of an i.i.d. symbolic path, reproducible from the seed."""

    seed: int
    symbols: np.ndarray = field(repr=False)

    def __len__(self):
        return len(self.symbols)


def _draw_symbols(weights: np.ndarray, length: int, rng: np.random.Generator):
    cum = np.cumsum(weights)
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(length), side="right").astype(np.int64)


def sample_path(cocycle, length: int, seed: int) -> PathSample:
    """i.i.d. symbols with the cocycle's weights; deterministic in the seed."""
    if length < 0:
        raise OutOfRange("length must be >= 0")
    rng = substream(seed)
    return PathSample(seed=seed, symbols=_draw_symbols(cocycle.weights, length, rng))


def word_product(cocycle, symbols):
    """Renormalized product L^n = A_{s_{n-1}} ... A_{s_0}.

    Returns (direction, acc, logdet) with direction of unit operator norm,
    L^n = exp(acc) * direction and log|det L^n| = logdet.
    """
    symbols = np.ascontiguousarray(symbols, dtype=np.int64)
    if symbols.size and (symbols.min() < 0 or symbols.max() >= cocycle.alphabet):
        raise OutOfRange("symbol outside alphabet")
    return cocycle.product_along(symbols)


def cocycle_distance(a: FiniteCocycle, b: FiniteCocycle) -> float:
    """sup over atoms of the operator norm of the difference (paired atoms)."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("cocycles have different alphabet sizes")
    return max(
        operator_norm(a.matrices[i] - b.matrices[i]) for i in range(a.alphabet)
    )


def weight_distance(p, q) -> float:
    """Total variation sum |p_i - q_i| (sup over |phi| <= 1 test functions)."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise AlphabetMismatch("weight vectors have different lengths")
    return float(np.sum(np.abs(p - q)))


def scalar_split(a: FiniteCocycle):
    """Write A_i = c_i B_i with det B_i = 1, c_i the principal sqrt of det A_i."""
    scalars = np.empty(a.alphabet, dtype=np.complex128)
    mats = np.empty_like(a.matrices)
    for i, m in enumerate(a.matrices):
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) == 0.0:
            raise SingularMatrix(f"matrix {i} is singular")
        c = cmath.sqrt(det)
        scalars[i] = c
        mats[i] = m / c
    return FiniteCocycle(mats, a.weights.copy()), scalars


def window_eval(w: WindowCocycle, path: PathSample, position: int) -> np.ndarray:
    """Table lookup at a path position; the window must fit in the sample."""
    r = w.radius
    if position - r < 0 or position + r >= len(path.symbols):
        raise OutOfRange(
            f"window [{position - r}, {position + r}] outside sampled range"
        )
    word = path.symbols[position - r : position + r + 1]
    return w.table[w.word_index(word)].copy()


def as_window(cocycle, radius: int = 0) -> WindowCocycle:
    """Expand a cocycle to a window representation of at least this radius."""
    if isinstance(cocycle, WindowCocycle):
        if radius < cocycle.radius:
            radius = cocycle.radius
        if radius == cocycle.radius:
            return cocycle
        extra = radius - cocycle.radius
        m = cocycle.alphabet
        size = m ** (2 * radius + 1)
        table = np.empty((size, 2, 2), dtype=np.complex128)
        inner = m ** (2 * cocycle.radius + 1)
        # central 2*old_radius+1 digits of the wider word select the old entry
        right = m**extra
        for code in range(size):
            table[code] = cocycle.table[(code // right) % inner]
        return WindowCocycle(m, radius, table, cocycle.weights.copy())
    m = cocycle.alphabet
    size = m ** (2 * radius + 1)
    table = np.empty((size, 2, 2), dtype=np.complex128)
    right = m**radius
    for code in range(size):
        table[code] = cocycle.matrices[(code // right) % m]
    return WindowCocycle(m, radius, table, cocycle.weights.copy())


def window_distance(a, b) -> float:
    """sup over window words of ||A(word) - B(word)|| after aligning radii."""
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("cocycles have different alphabet sizes")
    ra = a.radius if isinstance(a, WindowCocycle) else 0
    rb = b.radius if isinstance(b, WindowCocycle) else 0
    r = max(ra, rb)
    wa, wb = as_window(a, r), as_window(b, r)
    return max(
        operator_norm(wa.table[i] - wb.table[i]) for i in range(wa.table.shape[0])
    )


# ---------------------------------------------------------------------------
# definition-file schema (JSON payload, see README)

SCHEMA_VERSION = 1


def _mat_from_entries(entries) -> np.ndarray:
    if len(entries) != 4:
        raise InvalidCocycle("each matrix needs 4 [re, im] entries (row-major)")
    vals = [complex(float(e[0]), float(e[1])) for e in entries]
    return np.array([[vals[0], vals[1]], [vals[2], vals[3]]], dtype=np.complex128)


def _mat_to_entries(m) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel()]


def cocycle_from_dict(data: dict):
    """Build a cocycle from the documented definition-file payload."""
    try:
        version = int(data.get("schema_version", SCHEMA_VERSION))
        if version != SCHEMA_VERSION:
            raise InvalidCocycle(f"unsupported schema_version {version}")
        alphabet = int(data["alphabet"])
        weights = np.asarray(data["weights"], dtype=np.float64)
        if "window" in data and data["window"] is not None:
            win = data["window"]
            radius = int(win["radius"])
            width = 2 * radius + 1
            size = alphabet**width
            table = np.empty((size, 2, 2), dtype=np.complex128)
            seen = np.zeros(size, dtype=bool)
            for key, entries in win["table"].items():
                if len(key) != width:
                    raise InvalidCocycle(f"window word {key!r} has wrong length")
                code = 0
                for ch in key:
                    digit = int(ch)
                    if digit >= alphabet:
                        raise InvalidCocycle(f"digit {ch!r} outside alphabet")
                    code = code * alphabet + digit
                table[code] = _mat_from_entries(entries)
                seen[code] = True
            if not seen.all():
                raise InvalidCocycle("window table is not total")
            return WindowCocycle(alphabet, radius, table, weights)
        mats = np.stack([_mat_from_entries(e) for e in data["matrices"]])
        if mats.shape[0] != alphabet:
            raise InvalidCocycle("alphabet size / matrix count mismatch")
        return FiniteCocycle(mats, weights)
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidCocycle(f"malformed cocycle definition: {exc}") from exc


def cocycle_to_dict(cocycle) -> dict:
    """Inverse of `cocycle_from_dict`."""
    data = {
        "schema_version": SCHEMA_VERSION,
        "alphabet": int(cocycle.alphabet),
        "weights": [float(w) for w in cocycle.weights],
    }
    if isinstance(cocycle, WindowCocycle):
        width = cocycle.width
        digits = "0123456789"[: cocycle.alphabet]
        table = {}
        for code in range(cocycle.table.shape[0]):
            key, c = [], code
            for _ in range(width):
                key.append(digits[c % cocycle.alphabet])
                c //= cocycle.alphabet
            table["".join(reversed(key))] = _mat_to_entries(cocycle.table[code])
        data["window"] = {"radius": int(cocycle.radius), "table": table}
    else:
        data["matrices"] = [_mat_to_entries(m) for m in cocycle.matrices]
    return data
