"""Exact finite-N spectral form factors of the GUE.

Every quantity is assembled from two oscillator ingredients: the diagonal
sum I(t) and the table X(t) (see :mod:`guenoise.oscillator`).  Notation:

    R2(t)  = E |Z(t)|^2
    R41(t) = E Z(t)^2 Z*(2t)
    R4(t)  = E |Z(t)|^4,        Z(t) = tr exp(-i G t).

The kappa functions are Fourier transforms of the k-point marginal
eigenvalue densities.  Each R is a combination of kappas weighted by
falling factorials N!/(N-k)!; terms whose falling factorial vanishes are
dropped, so the R functions are exact for every N >= 1 even though kappa41
and kappa4 themselves need N >= 3 and N >= 4.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError, NumericConsistencyError, UnsupportedRegimeError
from .oscillator import diag_sum, x_matrix

MAX_ANALYTIC_N = 128
IMAG_TOL = 1e-9

KINDS = ("r2", "r41", "r4")
T0_POWER = {"r2": 2, "r41": 3, "r4": 4}


def _check_n(n, minimum=1, what="spectral form factor") -> int:
    if int(n) != n or n < minimum:
        raise InvalidDimensionError(f"{what} needs n >= {minimum}, got {n}")
    n = int(n)
    if n > MAX_ANALYTIC_N:
        raise UnsupportedRegimeError(
            f"analytic {what} is supported up to n = {MAX_ANALYTIC_N}; use sff_mc for n = {n}"
        )
    return n


def falling(n: int, k: int) -> float:
    """N!/(N-k)! as a running product (zero when k > N)."""
    out = 1.0
    for j in range(k):
        out *= n - j
    return out


def _real(value: complex, terms, what: str) -> float:
    scale = max(sum(abs(complex(v)) for v in terms), 1e-300)
    if abs(value.imag) > IMAG_TOL * scale:
        raise NumericConsistencyError(
            f"{what} has imaginary residue {value.imag:.3e} (scale {scale:.3e})",
            {"real": value.real, "imag": value.imag, "scale": scale},
        )
    return float(value.real)


def kappa2(t: float, n: int) -> float:
    """Two-point kappa: (|I(t)|^2 - sum_mn |X_mn(t)|^2) / (N(N-1))."""
    n = _check_n(n, 2, "kappa2")
    return (_r2_connected_part(t, n)) / falling(n, 2)


def _r2_connected_part(t, n):
    i_t = diag_sum(t, n)
    x = x_matrix(t, n)
    return i_t * i_t - float(np.sum(np.abs(x) ** 2))


def sff2(t: float, n: int) -> float:
    """Two-point form factor R2(t) = N + |I(t)|^2 - sum_mn |X_mn(t)|^2."""
    n = _check_n(n)
    return n + _r2_connected_part(t, n)


def _kappa41_bracket(t, n):
    i1, i2 = diag_sum(t, n), diag_sum(2 * t, n)
    p = x_matrix(t, n)
    m2 = x_matrix(-2 * t, n)
    pp = p @ p
    terms = (
        i1 * i1 * i2,
        2.0 * np.sum(pp * m2.T),
        -2.0 * i1 * np.sum(p * m2.T),
        -i2 * np.trace(pp),
    )
    return sum(terms), terms


def kappa41(t: float, n: int) -> float:
    """Three-point kappa entering R41; needs n >= 3."""
    n = _check_n(n, 3, "kappa41")
    value, terms = _kappa41_bracket(t, n)
    return _real(value, terms, "kappa41") / falling(n, 3)


def _kappa4_bracket(t, n):
    i1 = diag_sum(t, n)
    p = x_matrix(t, n)
    q = p.conj()
    pp, qq, pq = p @ p, q @ q, p @ q
    tr_pp, tr_qq, tr_pq = np.trace(pp), np.trace(qq), np.trace(pq)
    i2 = i1 * i1
    terms = (
        i2 * i2,
        -i2 * (tr_qq + tr_pp),
        -4.0 * i2 * tr_pq,
        8.0 * i1 * np.sum(qq * p.T).real,
        tr_pp * tr_qq,
        2.0 * tr_pq * tr_pq,
        -4.0 * np.sum(qq * pp.T),
        -2.0 * np.sum(pq * pq.T),
    )
    return sum(terms), terms


def kappa4(t: float, n: int) -> float:
    """Four-point kappa entering R4; needs n >= 4."""
    n = _check_n(n, 4, "kappa4")
    value, terms = _kappa4_bracket(t, n)
    return _real(value, terms, "kappa4") / falling(n, 4)


def sff41(t: float, n: int) -> float:
    """R41(t) = E Z(t)^2 Z*(2t)."""
    n = _check_n(n)
    out = float(n)
    if n >= 2:
        out += 2 * falling(n, 2) * kappa2(t, n) + falling(n, 2) * kappa2(2 * t, n)
    if n >= 3:
        out += falling(n, 3) * kappa41(t, n)
    return out


def sff4(t: float, n: int) -> float:
    """R4(t) = E |Z(t)|^4."""
    n = _check_n(n)
    out = float(n * (2 * n - 1))
    if n >= 2:
        out += 4 * n * (n - 1) ** 2 * kappa2(t, n) + falling(n, 2) * kappa2(2 * t, n)
    if n >= 3:
        out += 2 * falling(n, 3) * kappa41(t, n)
    if n >= 4:
        out += falling(n, 4) * kappa4(t, n)
    return out


def sff_laguerre(t: float, n: int) -> float:
    """R2 from the double-Laguerre closed form (kept as an independent check).

    Loses accuracy once e^{-t^2/2} underflows against the polynomial growth,
    so it is only meant for moderate t and n.
    """
    from .oscillator import laguerre

    n = _check_n(n)
    x = 0.5 * t * t
    total = laguerre(n - 1, 1, x) ** 2
    for m in range(n):
        for k in range(n):
            total -= (-1) ** (m - k) * laguerre(k, m - k, x) * laguerre(m, k - m, x)
    return float(n + np.exp(-x) * total)


_EVALUATORS = {"r2": sff2, "r41": sff41, "r4": sff4}


@dataclass
class SffCurve:
    kind: str
    n: int
    t_grid: np.ndarray
    values: np.ndarray
    std_error: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def normalized(self, power: int | None = None) -> np.ndarray:
        power = T0_POWER[self.kind] if power is None else power
        return self.values / float(self.n) ** power


def default_t_grid(n: int, points: int = 256, t_min: float = 1e-2, t_max: float | None = None) -> np.ndarray:
    """``points`` geometric points from ``t_min`` to ``t_max`` (default 10 n), plus t = 0."""
    t_max = 10.0 * n if t_max is None else t_max
    return np.concatenate([[0.0], np.geomspace(t_min, t_max, points)])


def sff_curve(kind: str, t_grid, n: int) -> SffCurve:
    """Evaluate ``kind`` in {'r2', 'r41', 'r4'} over a grid of times."""
    try:
        fn = _EVALUATORS[kind]
    except KeyError:
        raise InvalidInputError(f"unknown form factor kind {kind!r}") from None
    n = _check_n(n)
    grid = np.asarray(t_grid, dtype=float)
    values = np.array([fn(t, n) for t in grid])
    return SffCurve(kind, n, grid, values)
