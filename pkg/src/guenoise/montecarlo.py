"""Brute-force Monte Carlo oracle.

Samples are drawn in fixed-size batches.  Batch ``i`` draws from its own
child stream of the caller's :class:`RngStream`, and the per-batch statistics
are merged in batch order, so the result depends only on (seed, stream,
samples) and never on the number of worker threads.  The thread count is read
from ``GUENOISE_THREADS`` (default: all logical cores).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensemble import RngStream, as_generator, check_hermitian, sample_gue_batch
from .errors import InvalidInputError, InvalidParameterError, MonteCarloAbortError

FAILURE_BUDGET = 1e-3
THREADS_ENV = "GUENOISE_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise InvalidParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
        if value < 1:
            raise InvalidParameterError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


@dataclass
class McEstimate:
    """Sample mean with standard error.

    For complex data ``std_error`` is sqrt((Var(re) + Var(im)) / samples), i.e. the
    root-mean-square size of the error of the complex mean.
    """

    mean: np.ndarray
    std_error: np.ndarray
    samples: int
    failures: int = 0

    def z_scores(self, reference) -> np.ndarray:
        dev = np.abs(np.asarray(reference) - self.mean)
        se = np.asarray(self.std_error)
        safe = np.where(se > 0, se, 1.0)
        return np.where(se > 0, dev / safe, np.where(dev > 1e-12 * (1 + np.abs(reference)), np.inf, 0.0))


@dataclass
class _Moments:
    count: int
    mean: np.ndarray
    m2: np.ndarray  # sum of squared deviations, summed over re/im
    failures: int = 0

    @classmethod
    def of(cls, values: np.ndarray, failures: int = 0) -> "_Moments":
        count = values.shape[0]
        mean = values.mean(axis=0)
        m2 = np.sum(np.abs(values - mean) ** 2, axis=0)
        return cls(count, mean, m2, failures)

    def merge(self, other: "_Moments") -> "_Moments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / total)
        m2 = self.m2 + other.m2 + np.abs(delta) ** 2 * (self.count * other.count / total)
        return _Moments(total, mean, m2, self.failures + other.failures)

    def estimate(self) -> McEstimate:
        if self.count < 2:
            raise InvalidParameterError("at least two successful samples are required")
        var = self.m2 / (self.count - 1)
        return McEstimate(self.mean, np.sqrt(var / self.count), self.count, self.failures)


def merge_moments(parts) -> _Moments:
    out = _Moments(0, 0.0, 0.0)
    for part in parts:
        out = out.merge(part)
    return out


def _batch_plan(samples: int, batch_size: int) -> list[int]:
    full, rest = divmod(samples, batch_size)
    return [batch_size] * full + ([rest] if rest else [])


def run_batches(fn, samples: int, rng, batch_size: int) -> McEstimate:
    """Evaluate ``fn(generator, size) -> (values, failures)`` over all batches and merge."""
    if int(samples) != samples or samples < 2:
        raise InvalidParameterError(f"samples must be an integer >= 2, got {samples}")
    stream = rng if isinstance(rng, RngStream) else RngStream(int(rng))
    plan = _batch_plan(int(samples), max(1, int(batch_size)))

    def work(i):
        values, failures = fn(stream.child(i).generator(), plan[i])
        return _Moments.of(values, failures) if values.shape[0] else _Moments(0, 0.0, 0.0, failures)

    workers = min(thread_count(), len(plan))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, range(len(plan))))
    else:
        parts = [work(i) for i in range(len(plan))]
    merged = merge_moments(parts)
    if merged.failures > FAILURE_BUDGET * samples:
        raise MonteCarloAbortError(
            f"{merged.failures} of {samples} draws failed to decompose",
            {"failures": merged.failures, "samples": samples},
        )
    return merged.estimate()


def _eigh_batch(g):
    """Batched eigendecomposition that isolates failing draws instead of losing the batch."""
    try:
        w, v = np.linalg.eigh(g)
        return w, v, np.ones(g.shape[0], bool)
    except np.linalg.LinAlgError:
        ok = np.ones(g.shape[0], bool)
        w = np.zeros(g.shape[:2])
        v = np.zeros(g.shape, complex)
        for i in range(g.shape[0]):
            try:
                w[i], v[i] = np.linalg.eigh(g[i])
            except np.linalg.LinAlgError:
                ok[i] = False
        return w, v, ok


def evolved_batch(a: np.ndarray, t: float, gen, size: int):
    """Draw ``size`` GUE matrices and return (A_G(t) stack, failures), A_G = U^dag A U, U = e^{-iGt}."""
    n = a.shape[0]
    w, v, ok = _eigh_batch(sample_gue_batch(n, size, gen))
    w, v = w[ok], v[ok]
    u = (v * np.exp(-1j * w * t)[:, None, :]) @ v.conj().swapaxes(-1, -2)
    out = u.conj().swapaxes(-1, -2) @ a @ u
    return out, int((~ok).sum())


def _batch_size(n, per_sample):
    # Depends only on the problem shape, never on the thread count.
    return int(np.clip(2**22 // max(1, per_sample), 64, 8192))


def mc_channel_average(a, t: float, samples: int, rng) -> McEstimate:
    """Entrywise mean and std error of U^dag A U over GUE draws."""
    a = check_hermitian(a, name="A")
    n = a.shape[0]
    return run_batches(lambda gen, size: evolved_batch(a, t, gen, size), samples, rng, _batch_size(n, n * n * 4))


def mc_twofold(a, b, t: float, samples: int, rng) -> McEstimate:
    """Entrywise mean of A_G(t) (x) B_G(t) as an (n^2, n^2) array."""
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"A and B must be square matrices of equal size, got {a.shape} and {b.shape}")
    n = a.shape[0]
    pair = np.stack([a, b])

    def fn(gen, size):
        w, v, ok = _eigh_batch(sample_gue_batch(n, size, gen))
        w, v = w[ok], v[ok]
        u = (v * np.exp(-1j * w * t)[:, None, :]) @ v.conj().swapaxes(-1, -2)
        ud = u.conj().swapaxes(-1, -2)
        ag = ud @ pair[0] @ u
        bg = ud @ pair[1] @ u
        kron = np.einsum("sij,skl->sikjl", ag, bg).reshape(-1, n * n, n * n)
        return kron, int((~ok).sum())

    return run_batches(fn, samples, rng, _batch_size(n, n**4 * 8))


def _check_sff_orders(p, q):
    if int(p) != p or p < 1:
        raise InvalidParameterError(f"p must be a positive integer, got {p}")
    q = tuple(int(v) for v in (q or ()))
    if any(v < 1 for v in q):
        raise InvalidParameterError(f"q entries must be positive integers, got {q}")
    if sum(v + 1 for v in q) > p:
        raise InvalidParameterError(f"need sum(q_i + 1) <= p, got p={p}, q={q}")
    return int(p), q


def sff_mc_curve(p: int, q, t_grid, n: int, samples: int, rng) -> McEstimate:
    """Monte Carlo generalized form factor on a grid of times.

    Estimates E[ Z(t)^p Z*(t)^{p - sum(q_i + 1)} prod_i Z*((q_i + 1) t) ], where each
    q_i counts the Kronecker deltas merged into one group.  (p, ()) is E|Z|^{2p};
    (2, (1,)) is R41.  The returned mean is the real part; the imaginary part,
    which vanishes in expectation, is dropped.
    """
    p, q = _check_sff_orders(p, q)
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")
    grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    rest = p - sum(v + 1 for v in q)

    def fn(gen, size):
        lam = np.linalg.eigvalsh(sample_gue_batch(n, size, gen))
        z = lambda s: np.exp(-1j * s[None, :, None] * lam[:, None, :]).sum(-1)
        zt = z(grid)
        val = zt**p * zt.conj() ** rest
        for v in q:
            val = val * z((v + 1) * grid).conj()
        return val.real, 0

    return run_batches(fn, samples, rng, _batch_size(n, n * grid.size * 4))


def sff_mc(p: int, q, t: float, n: int, samples: int, rng):
    """Scalar form of :func:`sff_mc_curve`; returns ``(estimate, std_error)``."""
    est = sff_mc_curve(p, q, [t], n, samples, rng)
    return float(est.mean[0]), float(est.std_error[0])


def haar_unitary_batch(n: int, size: int, rng) -> np.ndarray:
    gen = as_generator(rng)
    z = gen.normal(size=(size, n, n, 2)) @ np.array([1.0, 1j]) / np.sqrt(2.0)
    qm, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    return qm * (d / np.abs(d))[:, None, :]


def mc_haar_unitary(n: int, rng) -> np.ndarray:
    """One Haar-random unitary from the QR factorization of a complex Ginibre matrix."""
    if int(n) != n or n < 1:
        raise InvalidParameterError(f"n must be a positive integer, got {n}")
    return haar_unitary_batch(int(n), 1, rng)[0]


def mc_nested_variance(m: int, k: int, t: float, dim: int, sigma_a: float, samples: int, rng) -> McEstimate:
    """Monte Carlo of E_A[Var_G (A_G(t))_{mk}] with A drawn from a GUE of entry scale ``sigma_a``.

    Each sample draws one A and two independent G; |x1 - x2|^2 / 2 is then an
    unbiased estimate of the inner variance.
    """
    if not (0 <= m < dim and 0 <= k < dim):
        raise InvalidParameterError(f"element ({m}, {k}) outside a {dim}x{dim} matrix")

    def fn(gen, size):
        a = sigma_a * np.sqrt(2.0) * sample_gue_batch(dim, size, gen)
        xs = []
        for _ in range(2):
            w, v, ok = _eigh_batch(sample_gue_batch(dim, size, gen))
            u = (v * np.exp(-1j * w * t)[:, None, :]) @ v.conj().swapaxes(-1, -2)
            # (U^dag A U)_{mk}
            inner = np.einsum("sq,sqr,sr->s", u[:, :, m].conj(), a, u[:, :, k])
            xs.append((inner, ok))
        ok = xs[0][1] & xs[1][1]
        val = np.abs(xs[0][0] - xs[1][0])[ok] ** 2 / 2.0
        return val, int((~ok).sum())

    return run_batches(fn, samples, rng, _batch_size(dim, dim * dim * 16))
