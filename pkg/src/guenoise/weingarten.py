"""Unitary Weingarten calculus.

Haar moments of k entries of V and k entries of V* are

    E[V_{a1 b1} ... V_{ak bk} V*_{α1 β1} ... V*_{αk βk}]
        = sum_{π, τ in S_k} Wg(τ^{-1} π) prod_i δ(a_i, α_{π(i)}) δ(b_i, β_{τ(i)}).

Here ``k`` counts the factors of V (the twofold channel uses k = 4).
Permutations are tuples p with p[i] the image of i, on 0..k-1.
Wg depends only on the cycle type of its argument, so it is obtained from the
class-collapsed Gram system

    sum_τ n^{#cycles(σ τ^{-1})} Wg(τ) = δ(σ, e),    one row per class of σ.

The system is singular for n < k; there the Moore-Penrose inverse of the full
Gram matrix still yields exact Haar integrals and is available on request.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple

import numpy as np

from .errors import InvalidInputError, NumericConsistencyError, UnsupportedRegimeError

MAX_ORDER = 6


def check_permutation(perm) -> tuple:
    p = tuple(int(v) for v in perm)
    if sorted(p) != list(range(len(p))):
        raise InvalidInputError(f"not a permutation of 0..{len(p) - 1}: {perm}")
    return p


def cycles(perm) -> list[list[int]]:
    p = check_permutation(perm)
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc, j = [], start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(cyc)
    return out


def cycle_type(perm) -> tuple:
    """Cycle lengths of ``perm`` sorted in descending order."""
    return tuple(sorted((len(c) for c in cycles(perm)), reverse=True))


def compose(a, b) -> tuple:
    """(a o b)(i) = a[b[i]]."""
    return tuple(a[i] for i in b)


def inverse(p) -> tuple:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def partitions(k: int) -> list[tuple]:
    """Integer partitions of k, parts descending, in reverse lexicographic order."""

    def rec(rem, cap):
        if rem == 0:
            yield ()
            return
        for part in range(min(rem, cap), 0, -1):
            for tail in rec(rem - part, part):
                yield (part,) + tail

    return list(rec(k, k))


def closed_form_order2(n: int) -> dict:
    return {(1, 1): 1.0 / (n * n - 1.0), (2,): -1.0 / (n * (n * n - 1.0))}


@dataclass(frozen=True)
class WeingartenTable:
    k: int
    n: int
    values: dict

    def __call__(self, *parts) -> float:
        key = tuple(sorted(parts[0] if len(parts) == 1 and isinstance(parts[0], tuple) else parts, reverse=True))
        return self.values[key]

    def of(self, perm) -> float:
        return self.values[cycle_type(perm)]

    def row_sum(self) -> float:
        """sum_σ Wg(σ) n^{#cycles(σ)}; equals 1 for a valid table."""
        return float(sum(self.of(p) * self.n ** len(cycles(p)) for p in itertools.permutations(range(self.k))))


def _check_order(k) -> int:
    if int(k) != k or k < 1:
        raise InvalidInputError(f"order must be a positive integer, got {k}")
    if k > MAX_ORDER:
        raise UnsupportedRegimeError(f"Weingarten order k = {k} exceeds the supported maximum {MAX_ORDER}")
    return int(k)


@lru_cache(maxsize=None)
def _class_data(k):
    perms = list(itertools.permutations(range(k)))
    parts = partitions(k)
    index = {lam: i for i, lam in enumerate(parts)}
    cls = [index[cycle_type(p)] for p in perms]
    reps = {}
    for p, c in zip(perms, cls):
        reps.setdefault(c, p)
    # ncyc[c][j] = #cycles(rep_c o perms[j]^{-1})
    ncyc = np.array(
        [[len(cycles(compose(reps[c], inverse(tau)))) for tau in perms] for c in range(len(parts))]
    )
    return perms, parts, np.array(cls), ncyc


@lru_cache(maxsize=None)
def _table(k, n, degenerate):
    perms, parts, cls, ncyc = _class_data(k)
    if degenerate:
        full = np.array([[n ** len(cycles(compose(s, inverse(t)))) for t in perms] for s in perms], float)
        row = np.linalg.pinv(full)[0]
        values = {}
        for lam_i, lam in enumerate(parts):
            values[lam] = float(np.mean(row[cls == lam_i]))
        return values
    m = len(parts)
    gram = np.zeros((m, m))
    for c in range(m):
        np.add.at(gram[c], cls, float(n) ** ncyc[c])
    rhs = np.zeros(m)
    rhs[parts.index((1,) * k)] = 1.0
    sol = np.linalg.solve(gram, rhs)
    resid = np.max(np.abs(gram @ sol - rhs))
    if resid > 1e-10:
        raise NumericConsistencyError(f"Gram solve residual {resid:.3e} at k={k}, n={n}", {"k": k, "n": n})
    return dict(zip(parts, map(float, sol)))


def weingarten_table(k: int, n: int, allow_degenerate: bool = False) -> WeingartenTable:
    """Weingarten values Wg(λ) for every cycle type λ of S_k at dimension n.

    Parameters
    ----------
    k : int
        Number of V factors in the moment, 1 <= k <= 6.
    n : int
        Unitary dimension.  n < k is rejected unless ``allow_degenerate``,
        in which case the pseudo-inverse of the Gram matrix is used.

    Returns
    -------
    WeingartenTable
    """
    k = _check_order(k)
    if int(n) != n or n < 1:
        raise InvalidInputError(f"dimension must be a positive integer, got {n}")
    n = int(n)
    degenerate = n < k
    if degenerate and not allow_degenerate:
        raise UnsupportedRegimeError(f"Gram matrix is singular for n = {n} < k = {k}")
    values = _table(k, n, degenerate)
    if k == 2 and not degenerate:
        for lam, ref in closed_form_order2(n).items():
            if abs(values[lam] - ref) > 1e-12 * abs(ref):
                raise NumericConsistencyError(f"order-2 Weingarten mismatch at n={n}: {values[lam]} vs {ref}")
    return WeingartenTable(k, n, dict(values))


class Contraction(NamedTuple):
    pi: tuple
    tau: tuple
    wg_class: tuple  # cycle type of tau^{-1} pi


def enumerate_contractions(k: int) -> Iterator[Contraction]:
    """Yield every (π, τ) in S_k x S_k with the class of τ^{-1} π; (k!)^2 items."""
    k = _check_order(k)
    perms = list(itertools.permutations(range(k)))
    for pi in perms:
        for tau in perms:
            yield Contraction(pi, tau, cycle_type(compose(inverse(tau), pi)))


def haar_moment(a, b, alpha, beta, table: WeingartenTable) -> float:
    """Weingarten prediction for E[prod V_{a_i b_i} prod V*_{α_i β_i}]."""
    k = table.k
    if not all(len(v) == k for v in (a, b, alpha, beta)):
        raise InvalidInputError("index tuples must all have length k")
    perms = list(itertools.permutations(range(k)))
    row_ok = [p for p in perms if all(a[i] == alpha[p[i]] for i in range(k))]
    col_ok = [p for p in perms if all(b[i] == beta[p[i]] for i in range(k))]
    return float(sum(table.of(compose(inverse(tau), pi)) for pi in row_ok for tau in col_ok))


@dataclass
class HaarCheck:
    max_abs_deviation: float
    max_z_score: float
    panel: list  # (indices, predicted, estimate, std_error)


def haar_mc_validate(k: int, n: int, samples: int, rng, panel_size: int = 8) -> HaarCheck:
    """Compare a panel of Haar moments with Monte Carlo over Haar unitaries.

    The panel always contains the diagonal moment with a = b = α = β = (0, 1, ..., k-1)
    (indices reduced mod n) followed by random index patterns with nonzero prediction.
    """
    from .ensemble import as_generator
    from .montecarlo import haar_unitary_batch

    k = _check_order(k)
    if k > 4:
        raise UnsupportedRegimeError("Haar Monte Carlo validation is limited to k <= 4")
    table = weingarten_table(k, n, allow_degenerate=True)
    gen = as_generator(rng)
    base = tuple(i % n for i in range(k))
    panel = [(base, base, base, base)]
    tries = 0
    while len(panel) < panel_size and tries < 1000:
        tries += 1
        a = tuple(gen.integers(n, size=k))
        b = tuple(gen.integers(n, size=k))
        alpha = tuple(a[i] for i in gen.permutation(k))
        beta = tuple(b[i] for i in gen.permutation(k))
        if (a, b, alpha, beta) not in panel:
            panel.append((a, b, alpha, beta))
    preds = [haar_moment(*idx, table) for idx in panel]
    sums = np.zeros(len(panel), complex)
    sq = np.zeros(len(panel))
    batch = 10000
    done = 0
    while done < samples:
        size = min(batch, samples - done)
        v = haar_unitary_batch(n, size, gen)
        for j, (a, b, alpha, beta) in enumerate(panel):
            prod = np.ones(size, complex)
            for i in range(k):
                prod *= v[:, a[i], b[i]] * v[:, alpha[i], beta[i]].conj()
            sums[j] += prod.sum()
            sq[j] += np.sum(np.abs(prod) ** 2)
        done += size
    means = sums / samples
    var = np.maximum(sq / samples - np.abs(means) ** 2, 0.0) * samples / (samples - 1)
    se = np.sqrt(var / samples)
    dev = np.abs(means - np.array(preds))
    z = np.where(se > 0, dev / np.where(se > 0, se, 1.0), np.where(dev > 1e-12, np.inf, 0.0))
    rows = [(idx, p, complex(m), float(s)) for idx, p, m, s in zip(panel, preds, means, se)]
    return HaarCheck(float(dev.max()), float(z.max()), rows)
