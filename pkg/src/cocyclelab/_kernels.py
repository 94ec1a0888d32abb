"""Hot loops for long renormalized matrix products (numba).

The running product is rescaled to unit operator norm after every
multiplication and the log of the scale is accumulated, so products of
length 10^7 with exponential growth never overflow.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True, inline="always")
def _opnorm(m):
    frob2 = (
        abs(m[0, 0]) ** 2 + abs(m[0, 1]) ** 2 + abs(m[1, 0]) ** 2 + abs(m[1, 1]) ** 2
    )
    absdet = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = frob2 * frob2 - 4.0 * absdet * absdet
    if disc < 0.0:
        disc = 0.0
    return math.sqrt(0.5 * (frob2 + math.sqrt(disc)))


@njit(cache=True, nogil=True)
def product_log_norm(mats, symbols):
    """Renormalized product A_{s[n-1]} ... A_{s[1]} A_{s[0]}.

    Returns (unit-operator-norm matrix, accumulated log scale, accumulated
    log |det|): the true product equals exp(acc) * matrix and has
    |det| = exp(logdet).  The determinant is accumulated separately because
    the small singular value of the direction matrix underflows long before
    the product itself would.
    """
    cur = np.eye(2, dtype=np.complex128)
    acc = 0.0
    logdet = 0.0
    for t in range(symbols.shape[0]):
        a = mats[symbols[t]]
        logdet += math.log(abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]))
        n00 = a[0, 0] * cur[0, 0] + a[0, 1] * cur[1, 0]
        n01 = a[0, 0] * cur[0, 1] + a[0, 1] * cur[1, 1]
        n10 = a[1, 0] * cur[0, 0] + a[1, 1] * cur[1, 0]
        n11 = a[1, 0] * cur[0, 1] + a[1, 1] * cur[1, 1]
        cur[0, 0], cur[0, 1], cur[1, 0], cur[1, 1] = n00, n01, n10, n11
        norm = _opnorm(cur)
        cur /= norm
        acc += math.log(norm)
    return cur, acc, logdet


@njit(cache=True, nogil=True)
def window_product_log_norm(table, symbols, radius, alphabet):
    """Renormalized product of a window cocycle along a path.

    ``symbols`` includes margins: the product runs over positions
    radius .. len(symbols)-1-radius, the window at position p being
    symbols[p-radius .. p+radius] encoded base-``alphabet`` (leftmost
    coordinate is the most significant digit).  Same return convention as
    `product_log_norm`.
    """
    width = 2 * radius + 1
    n = symbols.shape[0] - 2 * radius
    cur = np.eye(2, dtype=np.complex128)
    acc = 0.0
    logdet = 0.0
    if n <= 0:
        return cur, acc, logdet
    code = 0
    for i in range(width):
        code = code * alphabet + symbols[i]
    high = alphabet ** (width - 1)
    for t in range(n):
        a = table[code]
        logdet += math.log(abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]))
        n00 = a[0, 0] * cur[0, 0] + a[0, 1] * cur[1, 0]
        n01 = a[0, 0] * cur[0, 1] + a[0, 1] * cur[1, 1]
        n10 = a[1, 0] * cur[0, 0] + a[1, 1] * cur[1, 0]
        n11 = a[1, 0] * cur[0, 1] + a[1, 1] * cur[1, 1]
        cur[0, 0], cur[0, 1], cur[1, 0], cur[1, 1] = n00, n01, n10, n11
        norm = _opnorm(cur)
        cur /= norm
        acc += math.log(norm)
        if t + 1 < n:
            code = (code % high) * alphabet + symbols[t + width]
    return cur, acc, logdet
