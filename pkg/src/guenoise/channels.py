"""GUE-averaged noisy channels.

A noisy evolution maps an observable A to A_G(t) = e^{iGt} A e^{-iGt} with G
drawn from the GUE.  This module gives the exact single-qubit evolution, the
onefold average (a depolarizing channel with strength f(t)), the twofold
average E[A_G (x) B_G] and the derived variance and typicality diagnostics.

Operators on the doubled space are (n^2, n^2) arrays in the ``np.kron``
ordering, with SWAP|i j> = |j i>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import check_hermitian
from .errors import DegeneratePointError, InvalidDimensionError, InvalidInputError, UnsupportedRegimeError
from .sff import sff2, sff4, sff41
from .weingarten import compose, cycles, inverse, weingarten_table

MAX_TWOFOLD_N = 64


# ---------------------------------------------------------------- qubit


@dataclass(frozen=True)
class PauliVector:
    """A = a0 * 1 + a . sigma for a 2x2 operator."""

    a0: float
    a: tuple

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) != 3:
            raise InvalidInputError("Pauli vector needs exactly three components")

    @property
    def vec(self) -> np.ndarray:
        return np.array(self.a)

    def to_matrix(self) -> np.ndarray:
        ax, ay, az = self.a
        return np.array([[self.a0 + az, ax - 1j * ay], [ax + 1j * ay, self.a0 - az]])

    @classmethod
    def from_matrix(cls, m) -> "PauliVector":
        m = check_hermitian(m, name="A")
        if m.shape != (2, 2):
            raise InvalidInputError(f"expected a 2x2 matrix, got {m.shape}")
        return cls(
            float(np.trace(m).real) / 2,
            (float(m[1, 0].real), float(m[1, 0].imag), float((m[0, 0] - m[1, 1]).real) / 2),
        )


def qubit_evolve(a: PauliVector, g, t: float) -> PauliVector:
    """Pauli vector of e^{i t g.σ} A e^{-i t g.σ}.

    With ĝ = g/|g| the vector part rotates as
    a cos(2|g|t) - sin(2|g|t) ĝ x a + 2 sin^2(|g|t) (ĝ . a) ĝ.
    Below |g| t = 1e-6 the trigonometric ratios use their Taylor series.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (3,):
        raise InvalidInputError("g must be a real 3-vector")
    vec = a.vec
    gn = float(np.linalg.norm(g))
    th = gn * t
    if abs(th) < 1e-6:
        c2 = 1.0 - 2.0 * th * th
        s2_over_g = 2.0 * t * (1.0 - 2.0 * th * th / 3.0)
        ssq_over_g2 = t * t * (1.0 - th * th / 3.0)
    else:
        c2 = math.cos(2 * th)
        s2_over_g = math.sin(2 * th) / gn
        ssq_over_g2 = math.sin(th) ** 2 / gn**2
    out = c2 * vec - s2_over_g * np.cross(g, vec) + 2.0 * ssq_over_g2 * np.dot(g, vec) * g
    return PauliVector(a.a0, tuple(out))


def qubit_f(t):
    """Qubit depolarizing strength (2/3) [1 - e^{-t^2/2} (1 - t^2)]."""
    t = np.asarray(t, dtype=float)
    out = (2.0 / 3.0) * (1.0 - np.exp(-0.5 * t * t) * (1.0 - t * t))
    return float(out) if out.ndim == 0 else out


def qubit_variance_curves(a: PauliVector, t: float) -> tuple[float, float]:
    """Variances of a diagonal and of an off-diagonal element of A_G(t) for a qubit."""
    f, f2 = qubit_f(t), qubit_f(2 * t)
    az2 = a.a[2] ** 2
    norm2 = float(np.dot(a.vec, a.vec))
    z_part = (7 * f - 3 * f2 - 5 * f * f) / 5
    var_diag = z_part * az2 + (f + f2) / 5 * norm2
    var_off = -z_part * az2 + (9 * f - f2 - 5 * f * f) / 5 * norm2
    return float(var_diag), float(var_off)


def qubit_matel_means(a: PauliVector, t: float):
    """Magnitudes of the averaged matrix elements: ((|<0|.|0>|, |<1|.|1>|), |<0|.|1>|)."""
    keep = 1.0 - qubit_f(t)
    ax, ay, az = a.a
    return (abs(a.a0 + keep * az), abs(a.a0 - keep * az)), keep * math.hypot(ax, ay)


# ---------------------------------------------------------------- onefold


@dataclass(frozen=True)
class DepolarizingChannel:
    n: int
    f: float

    def apply(self, a) -> np.ndarray:
        a = np.asarray(a)
        return (1.0 - self.f) * a + self.f * np.trace(a) / self.n * np.eye(self.n)


def depolarizing_f(t: float, n: int) -> DepolarizingChannel:
    """Depolarizing strength f = (n^2 - R2(t)) / (n^2 - 1) of the averaged channel."""
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"depolarizing channel needs n >= 2, got {n}")
    n = int(n)
    return DepolarizingChannel(n, (n * n - sff2(t, n)) / (n * n - 1.0))


def avg_channel_apply(a, t: float) -> np.ndarray:
    """E_G[A_G(t)] = (1 - f) A + f tr(A)/n 1."""
    a = check_hermitian(a, name="A")
    return depolarizing_f(t, a.shape[0]).apply(a)


# ---------------------------------------------------------------- twofold

GROUPS = ("AB", "BA", "1A", "A1", "trAtrB", "trAB", "1AB", "S")


@dataclass(frozen=True)
class TwofoldCoefficients:
    c_AB: float
    c_BA: float
    c_1A: float
    c_A1: float
    c_trAtrB: float
    c_trAB: float
    c_1AB: float
    c_S: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c_AB, self.c_BA, self.c_1A, self.c_A1, self.c_trAtrB, self.c_trAB, self.c_1AB, self.c_S])


# Each pairing π of the four Haar output legs yields one operator of the
# twofold channel; operators sharing a coefficient are grouped.
PAIRING_GROUP = {
    (0, 1, 2, 3): "AB", (2, 3, 0, 1): "BA",
    (1, 3, 0, 2): "1A", (2, 0, 3, 1): "1A", (2, 3, 1, 0): "1A", (3, 2, 0, 1): "1A",
    (0, 1, 3, 2): "A1", (1, 0, 2, 3): "A1", (0, 2, 1, 3): "A1", (3, 1, 2, 0): "A1",
    (1, 0, 3, 2): "trAtrB", (3, 2, 1, 0): "trAtrB",
    (1, 2, 3, 0): "trAB", (3, 0, 1, 2): "trAB",
    (1, 2, 0, 3): "1AB", (1, 3, 2, 0): "1AB", (0, 2, 3, 1): "1AB", (2, 1, 3, 0): "1AB",
    (0, 3, 1, 2): "1AB", (3, 1, 0, 2): "1AB", (2, 0, 1, 3): "1AB", (3, 0, 2, 1): "1AB",
    (2, 1, 0, 3): "S", (0, 3, 2, 1): "S",
}

_PHASE_SIGNS = (1, -1, 1, -1)


def _spectral_key(tau) -> tuple:
    # Eigenvalue phases seen by a column pairing τ: each cycle contributes
    # Z((sum of signs on the cycle) * t) to the averaged product.
    return tuple(sorted(sum(_PHASE_SIGNS[i] for i in cyc) for cyc in cycles(tau)))


def twofold_from_contractions(n: int, r2: float, r2_2t: float, r41: float, r4: float, table=None) -> TwofoldCoefficients:
    """Twofold coefficients by explicit summation over all 576 (π, τ) pairs.

    Works for every n >= 1 because the pseudo-inverse Weingarten table is
    used when n < 4.  Serves as the low-n path and as an independent check of
    the grouped closed forms.
    """
    import itertools

    table = table or weingarten_table(4, n, allow_degenerate=True)
    spectral = {
        (-1, 1): r2, (0,): n, (-1, 0, 1): n * r2, (0, 0): n * n,
        (-1, -1, 1, 1): r4, (-2, 1, 1): r41, (-1, -1, 2): r41, (-2, 2): r2_2t,
    }
    perms = list(itertools.permutations(range(4)))
    s_tau = {tau: spectral[_spectral_key(tau)] for tau in perms}
    out = {}
    for pi, group in PAIRING_GROUP.items():
        if group in out:
            continue
        out[group] = sum(table.of(compose(inverse(tau), pi)) * s_tau[tau] for tau in perms)
    return TwofoldCoefficients(*(float(out[g]) for g in GROUPS))


def twofold_closed_form(n: int, r2: float, r2_2t: float, r41: float, r4: float) -> TwofoldCoefficients:
    """Grouped closed forms; three-cycle-length Weingarten values come from S_3."""
    w4 = weingarten_table(4, n)
    w3 = weingarten_table(3, n)
    w1111, w211, w22, w31, w4_ = w4(1, 1, 1, 1), w4(2, 1, 1), w4(2, 2), w4(3, 1), w4(4)
    w3_3, w3_111, w3_21 = w3(3), w3(1, 1, 1), w3(2, 1)
    return TwofoldCoefficients(
        c_AB=n * w3_3 - 4 * w1111 * r2 + w22 * r2_2t + 2 * w211 * r41 + w1111 * r4,
        c_BA=-n * w3_3 - 4 * w22 * r2 + w1111 * r2_2t + 2 * w211 * r41 + w22 * r4,
        c_1A=2 * (w211 + n * w31) * r2 + w211 * r2_2t + 2 * w31 * r41 + w4_ * r4,
        c_A1=n * w3_21 + (n * w1111 - w211) * r2 + w4_ * r2_2t + 2 * w31 * r41 + w211 * r4,
        c_trAtrB=n * w3_111 - 2 * (w1111 + w22) * r2 + w22 * r2_2t + 2 * w4_ * r41 + w22 * r4,
        c_trAB=n * w3_21 - 4 * w211 * r2 + w4_ * r2_2t + 2 * w22 * r41 + w4_ * r4,
        c_1AB=-w3_21 - (w1111 + 4 * w31 - w22) * r2 + w31 * r2_2t + (w211 + w4_) * r41 + w31 * r4,
        c_S=-4 * w211 * r2 + w211 * r2_2t + (w1111 + w22) * r41 + w211 * r4,
    )


def twofold_coefficients(t: float, n: int) -> TwofoldCoefficients:
    """The eight coefficient functions of the twofold channel at time ``t``.

    For n >= 4 the grouped closed forms are used; for n in {2, 3} the
    coefficients are summed contraction by contraction with the
    pseudo-inverse Weingarten table, which is exact there as well.
    """
    if int(n) != n or n < 2:
        raise InvalidDimensionError(f"twofold channel needs n >= 2, got {n}")
    n = int(n)
    sffs = (sff2(t, n), sff2(2 * t, n), sff41(t, n), sff4(t, n))
    if n >= 4:
        return twofold_closed_form(n, *sffs)
    return twofold_from_contractions(n, *sffs)


def pairing_operator(pi, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Operator produced by the row pairing ``pi`` of the four Haar legs.

    Legs 0..3 carry the output indices (m, j, n, k) of U^dag A U (x) U^dag B U,
    and the conjugate legs carry (i, u, l, v) with A_{ij}, B_{lk}; ``pi``
    identifies leg s with conjugate leg pi[s].
    """
    n = a.shape[0]
    legs, conj_legs = "mjnk", "iulv"
    subs = ["ij", "lk"] + [legs[s] + conj_legs[pi[s]] for s in range(4)]
    ops = [a, b] + [np.eye(n)] * 4
    return np.einsum(",".join(subs) + "->mnuv", *ops).reshape(n * n, n * n)


def swap_operator(n: int) -> np.ndarray:
    idx = np.arange(n * n)
    s = np.zeros((n * n, n * n))
    s[(idx % n) * n + idx // n, idx] = 1.0
    return s


def _left_swap(m: np.ndarray, n: int) -> np.ndarray:
    # SWAP @ m without forming SWAP: permute the rows.
    return m.reshape(n, n, n * n).swapaxes(0, 1).reshape(n * n, n * n)


def twofold_operators(a: np.ndarray, b: np.ndarray) -> dict:
    """The grouped operator sums multiplying each twofold coefficient."""
    n = a.shape[0]
    one = np.eye(n)
    kron = np.kron
    tra, trb, trab = np.trace(a), np.trace(b), np.trace(a @ b)
    ab, ba = a @ b, b @ a
    ls = lambda m: _left_swap(m, n)
    ident = np.eye(n * n)
    swap = swap_operator(n)
    return {
        "AB": kron(a, b),
        "BA": kron(b, a),
        "1A": trb * kron(one, a) + tra * kron(b, one) + ls(kron(one, ba)) + ls(kron(ab, one)),
        "A1": trb * kron(a, one) + tra * kron(one, b) + ls(kron(one, ab)) + ls(kron(ba, one)),
        "trAtrB": tra * trb * ident + trab * swap,
        "trAB": trab * ident + tra * trb * swap,
        "1AB": kron(one, ab) + kron(one, ba) + kron(ab, one) + kron(ba, one)
        + ls(trb * kron(one, a) + trb * kron(a, one) + tra * kron(one, b) + tra * kron(b, one)),
        "S": ls(kron(a, b) + kron(b, a)),
    }


def _check_pair(a, b):
    a, b = np.asarray(a), np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise InvalidInputError(f"A and B must be square and of equal size, got {a.shape} and {b.shape}")
    n = a.shape[0]
    if n < 2:
        raise InvalidDimensionError("twofold channel needs n >= 2")
    if n > MAX_TWOFOLD_N:
        raise UnsupportedRegimeError(f"doubled-space operators are limited to n <= {MAX_TWOFOLD_N}")
    return a.astype(complex), b.astype(complex)


def twofold_apply(a, b, t: float, coefficients: TwofoldCoefficients | None = None) -> np.ndarray:
    """E_G[A_G(t) (x) B_G(t)] as an (n^2, n^2) array."""
    a, b = _check_pair(a, b)
    c = coefficients or twofold_coefficients(t, a.shape[0])
    ops = twofold_operators(a, b)
    return sum(coef * ops[g] for coef, g in zip(c.as_array(), GROUPS))


def partial_transpose_first(m: np.ndarray) -> np.ndarray:
    """Transpose the first tensor factor of an (n^2, n^2) operator."""
    n = math.isqrt(m.shape[0])
    return m.reshape(n, n, n, n).transpose(2, 1, 0, 3).reshape(n * n, n * n)


def variance_operator(a, t: float) -> np.ndarray:
    """E[A_G* (x) A_G] - E[A_G]* (x) E[A_G].

    Since A_G is Hermitian, A_G* is its transpose, so the first term is the
    first-factor partial transpose of the twofold channel applied to (A, A).
    Its entry <m m| . |n n> is the variance of the matrix element (A_G)_{mn}.
    """
    a = check_hermitian(a, name="A")
    avg = avg_channel_apply(a, t)
    return partial_transpose_first(twofold_apply(a, a, t)) - np.kron(avg.conj(), avg)


def matel_variance(var_op: np.ndarray, m: int, k: int) -> float:
    """Variance of element (m, k) read from a :func:`variance_operator` output."""
    n = math.isqrt(var_op.shape[0])
    return float(var_op[m * n + m, k * n + k].real)


def variance_matel_gue_avg(m: int, n: int, t: float, dim: int, sigma_a: float) -> float:
    """Variance of (A_G(t))_{mn} averaged over GUE observables A of entry scale ``sigma_a``.

    Equals sigma_a^2 (1 - δ_{mn}/dim) f(t) (2 - f(t)).
    """
    if sigma_a <= 0:
        raise InvalidInputError(f"sigma_a must be positive, got {sigma_a}")
    f = depolarizing_f(t, dim).f
    delta = 1.0 if m == n else 0.0
    return sigma_a**2 * (1.0 - delta / dim) * f * (2.0 - f)


def typicality(m: int, n: int, t: float, dim: int) -> float:
    """Standard deviation over root-mean-square mean of (A_G(t))_{mn} for GUE A.

    The mean square is sigma_a^2 [(1 - f)^2 + δ_{mn} f (2 - f)/dim], the part of
    E|A_mn|^2 = sigma_a^2 not accounted for by the variance.
    """
    f = depolarizing_f(t, dim).f
    delta = 1.0 if m == n else 0.0
    denom = (1.0 - f) ** 2 + delta * f * (2.0 - f) / dim
    if denom <= 1e-300:
        raise DegeneratePointError(f"mean of element ({m}, {n}) vanishes at t = {t}", point=t)
    return math.sqrt((1.0 - delta / dim) * f * (2.0 - f) / denom)
