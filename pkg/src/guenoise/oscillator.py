"""Laguerre polynomials and harmonic-oscillator matrix elements of exp(alpha x).

The central object is the table X[m, n](t) = <m| exp(-i t x) |n> over the
first N oscillator eigenstates.  With x = t^2/2 and d = |m - n|,

    X[m, n](t) = e^{-x/2} sqrt(min!/max!) x^{d/2} L_min^{(d)}(x) (-i sgn t)^d.

For fixed d the real factor w_k = e^{-x/2} x^{d/2} sqrt(k!/(k+d)!) L_k^{(d)}(x)
obeys the normalized recurrence

    sqrt((k+1)(k+1+d)) w_{k+1} = (2k+1+d-x) w_k - sqrt(k(k+d)) w_{k-1},

started from w_0 = exp(-x/2 + (d/2) log x - lgamma(d+1)/2).  No factorial is
ever formed, so the table stays finite for N up to a few hundred.  For
x beyond ~1400 the Gaussian prefactor underflows and entries flush to zero;
their true magnitude there is far below 1e-100.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError


def _check_dim(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"basis size must be a positive integer, got {n}")
    return int(n)


def _laguerre_upward(n: int, a, x):
    # (k+1) L_{k+1} = (2k+1+a-x) L_k - (k+a) L_{k-1}; valid for any real a.
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
    return cur


def laguerre(n: int, a: int, x):
    """Generalized Laguerre polynomial L_n^{(a)}(x).

    Parameters
    ----------
    n : int
        Degree, n >= 0.
    a : int
        Upper index.  Negative values with n >= -a use the reflection
        L_n^{(-b)}(x) = (n-b)!/n! (-x)^b L_{n-b}^{(b)}(x).
    x : float, complex or array_like
        Argument.

    Returns
    -------
    float, complex or ndarray
    """
    if int(n) != n or n < 0:
        raise InvalidInputError(f"Laguerre degree must be a nonnegative integer, got {n}")
    n, a = int(n), int(a)
    arr = np.asarray(x)
    xv = arr.astype(complex if np.iscomplexobj(arr) else float)
    if a < 0 and n >= -a:
        b = -a
        ratio = 1.0
        for k in range(n - b + 1, n + 1):
            ratio /= k
        out = ratio * (-xv) ** b * _laguerre_upward(n - b, b, xv)
    else:
        out = _laguerre_upward(n, a, xv)
    return out[()] if np.ndim(out) == 0 else out


def exp_x_element(m: int, n: int, alpha: complex) -> complex:
    """Oscillator matrix element <m| exp(alpha x) |n> for complex ``alpha``.

    Evaluates e^{alpha^2/4} sqrt(min!/max!) (alpha/sqrt 2)^d L_min^{(d)}(-alpha^2/2).
    The factorial ratio is accumulated as a running product of inverse square roots.
    """
    if int(m) != m or int(n) != n or m < 0 or n < 0:
        raise InvalidInputError(f"oscillator levels must be nonnegative integers, got ({m}, {n})")
    lo, hi = sorted((int(m), int(n)))
    d = hi - lo
    alpha = complex(alpha)
    if alpha == 0:
        return complex(m == n)
    ratio = 1.0
    for k in range(lo + 1, hi + 1):
        ratio /= math.sqrt(k)
    power = 1.0 + 0j
    step = alpha / math.sqrt(2.0)
    for _ in range(d):
        power *= step
    lag = laguerre(lo, d, -alpha * alpha / 2.0)
    return complex(np.exp(alpha * alpha / 4.0) * ratio * power * lag)


def _band_magnitudes(x: float, n: int) -> np.ndarray:
    """Signed real factors w[k, d] for k + d < n; zero elsewhere."""
    d = np.arange(n, dtype=float)
    w = np.zeros((n, n))
    with np.errstate(under="ignore"):
        w0 = np.exp(-0.5 * x + 0.5 * d * math.log(x) - 0.5 * np.array([math.lgamma(v + 1) for v in d]))
    w[0] = w0
    if n > 1:
        w[1] = w0 * (1.0 + d - x) / np.sqrt(d + 1.0)
    for k in range(1, n - 1):
        w[k + 1] = ((2 * k + 1 + d - x) * w[k] - np.sqrt(k * (k + d)) * w[k - 1]) / np.sqrt((k + 1) * (k + 1 + d))
    # rows k only hold meaningful data for d < n - k
    k_idx = np.arange(n)[:, None]
    w[k_idx + d[None, :] >= n] = 0.0
    return w


def x_matrix(t: float, n: int) -> np.ndarray:
    """Complex symmetric table X[m, n] = <m| exp(-i t x) |n>, m, n < ``n``."""
    n = _check_dim(n)
    t = float(t)
    x = 0.5 * t * t
    if x == 0.0:
        return np.eye(n, dtype=complex)
    w = _band_magnitudes(x, n)
    phase = (-1j * math.copysign(1.0, t)) ** np.arange(n)
    out = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    for d in range(n):
        k = idx[: n - d]
        vals = w[k, d] * phase[d]
        out[k, k + d] = vals
        out[k + d, k] = vals
    return out


def diag_sum(t: float, n: int) -> float:
    """I(t) = sum_{k<n} <k| exp(-i t x) |k> = e^{-t^2/4} L_{n-1}^{(1)}(t^2/2).

    Returned as a float; the diagonal elements are real for real ``t``.
    The sum is taken over the normalized recurrence rather than the closed
    form, which avoids multiplying a huge polynomial by a tiny Gaussian.
    """
    n = _check_dim(n)
    t = float(t)
    x = 0.5 * t * t
    if x == 0.0:
        return float(n)
    with np.errstate(under="ignore"):
        prev = math.exp(-0.5 * x)
    total = prev
    if n > 1:
        cur = prev * (1.0 - x)
        total += cur
        for k in range(1, n - 1):
            prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
            total += cur
    return float(total)
