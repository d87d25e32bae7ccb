"""GUE sampling, density, and eigendecomposition.

Throughout, the GUE width is fixed to sigma = 1/sqrt(2), i.e. the density is
proportional to exp(-tr G^2): diagonal entries are real normals with variance
1/2 and off-diagonal entries are complex normals with total variance 1/2.
A different width sigma is recovered by evaluating channels at t * sigma * sqrt(2).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidDimensionError, InvalidInputError, NumericError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class RngStream:
    """Reproducible, independent random stream keyed by ``(seed, stream)``.

    Distinct stream ids give statistically independent generators, which is
    what the parallel Monte Carlo layer relies on: each batch gets its own
    child stream and results never depend on scheduling order.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            value = getattr(self, name)
            if not 0 <= int(value) < 2**64:
                raise InvalidInputError(f"{name} must fit in an unsigned 64-bit integer, got {value}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.Philox(seq))

    def child(self, index: int) -> "RngStream":
        # Children are keyed off a mixed id so (s, k).child(i) never collides with (s, j).
        mixed = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream), int(index)))
        return RngStream(int(self.seed), int(mixed.generate_state(2, np.uint64)[0]))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng)).generator()
    raise InvalidInputError(f"cannot build a random generator from {type(rng).__name__}")


class EigenSystem(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_dim(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {n}")
    return int(n)


def hermiticity_residual(g: np.ndarray) -> float:
    return float(np.max(np.abs(g - g.conj().swapaxes(-1, -2)), initial=0.0))


def check_hermitian(g, tol: float = HERMITIAN_TOL, name: str = "matrix") -> np.ndarray:
    """Return ``g`` as a complex square array, raising if it is not Hermitian."""
    g = np.asarray(g)
    if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {g.shape}")
    res = hermiticity_residual(g)
    if res > tol:
        raise InvalidInputError(f"{name} is not Hermitian (residual {res:.3e} > {tol:.0e})")
    return g.astype(complex, copy=False)


def sample_gue_batch(n: int, size: int, rng) -> np.ndarray:
    """Draw ``size`` independent GUE matrices, shape ``(size, n, n)``."""
    n = _check_dim(n)
    gen = as_generator(rng)
    # X entries ~ N_C(0, 1): real and imaginary parts each have variance 1/2.
    x = gen.normal(scale=np.sqrt(0.5), size=(size, n, n, 2))
    x = x[..., 0] + 1j * x[..., 1]
    return 0.5 * (x + x.conj().swapaxes(-1, -2))


def sample_gue(n: int, rng) -> np.ndarray:
    """Sample one GUE matrix G = (X + X^dagger)/2.

    Parameters
    ----------
    n : int
        Matrix dimension, at least 1.
    rng : RngStream, numpy Generator or int seed
        Source of randomness.

    Returns
    -------
    ndarray
        Complex ``(n, n)`` array, exactly Hermitian.
    """
    return sample_gue_batch(n, 1, rng)[0]


def gue_log_density(g) -> float:
    """Unnormalized log-density ``-tr(G^2)``; the normalization is never needed."""
    g = check_hermitian(g, name="G")
    return -float(np.sum(np.abs(g) ** 2))


def semicircle_density(lam, n: int):
    """Large-N one-point eigenvalue density sqrt(2n - lam^2) / (pi n)."""
    n = _check_dim(n)
    lam = np.asarray(lam, dtype=float)
    inside = np.clip(2.0 * n - lam * lam, 0.0, None)
    out = np.sqrt(inside) / (np.pi * n)
    return float(out) if out.ndim == 0 else out


def eigen_decompose(g) -> EigenSystem:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    g = check_hermitian(g, name="G")
    try:
        w, v = np.linalg.eigh(g)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            "Hermitian eigensolver did not converge",
            {"dim": g.shape[0], "frobenius_norm": float(np.linalg.norm(g)), "lapack": str(exc)},
        ) from exc
    return EigenSystem(w, v)
