"""Deterministic, splittable random streams and the samplers built on them.

Every stochastic object in this package draws through an :class:`RngStream`.
A stream is a pure function of ``(master_seed, stream_id)``: reconstructing
it anywhere (another process, another worker count, another day) replays the
identical sequence.  Streams are counter-based underneath (Philox), so
distinct ``stream_id`` values give statistically independent sequences and
replicate-level parallelism needs no shared state.

Samplers cover the distributions the matrix models need: Gaussian, chi with
real (non-integer) degrees of freedom, and rate-1 exponentials.  The chi
quantile function — used to couple chi draws of different degrees of freedom
monotonically — is computed by bisection on the regularized incomplete gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special as sc

__all__ = [
    "RngStream",
    "make_stream",
    "stream_label",
    "sample_gaussian",
    "sample_chi",
    "sample_exponential",
    "chi_quantile",
    "chi_quantile_couple",
]

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # Standard splitmix64 finalizer; good avalanche, used only to key streams.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


def stream_label(tag: str, *indices: int) -> int:
    """Derive a 64-bit stream id from a purpose tag plus integer indices.

    Callers use distinct tags for distinct sub-experiments so stream spaces
    never collide (e.g. ``stream_label("tail", chunk)`` vs
    ``stream_label("qform", chunk)``).  The map is a fixed splitmix64 chain —
    stable across runs, platforms and Python versions.
    """
    h = _splitmix64(len(tag))
    for ch in tag.encode("utf-8"):
        h = _splitmix64(h ^ ch)
    for ix in indices:
        h = _splitmix64(h ^ (int(ix) & _MASK64))
    return h


@dataclass
class RngStream:
    """A reproducible random stream keyed by ``(master_seed, stream_id)``.

    Attributes
    ----------
    master_seed, stream_id :
        64-bit integers identifying the stream.  Equal pairs produce
        identical sequences; distinct ``stream_id`` values are independent.
    generator :
        The underlying :class:`numpy.random.Generator` (Philox).  Vectorized
        consumers may draw from it directly; scalar samplers below do too.
    """

    master_seed: int
    stream_id: int
    generator: np.random.Generator = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.generator is None:
            key = (
                _splitmix64(self.master_seed & _MASK64),
                _splitmix64(_splitmix64(self.master_seed & _MASK64) ^ (self.stream_id & _MASK64)),
            )
            bitgen = np.random.Philox(key=(key[0] | (key[1] << 64)))
            self.generator = np.random.Generator(bitgen)


def make_stream(master_seed: int, stream_id: int) -> RngStream:
    """Construct the stream for ``(master_seed, stream_id)``.

    Reconstruction is stateless: a fresh stream always replays from the
    beginning of its sequence.
    """
    return RngStream(int(master_seed), int(stream_id))


def sample_gaussian(s: RngStream, mean: float = 0.0, sd: float = 1.0) -> float:
    """One draw from N(mean, sd²).  ``sd`` must be nonnegative; ``sd = 0``
    returns ``mean`` exactly."""
    if sd < 0:
        raise ValueError(f"sd must be nonnegative, got {sd}")
    if sd == 0:
        return float(mean)
    return float(mean + sd * s.generator.standard_normal())


def sample_chi(s: RngStream, k: float) -> float:
    """One chi draw with ``k > 0`` (possibly non-integer) degrees of freedom.

    Implemented as the square root of a gamma(k/2, scale 2) draw, so X ≥ 0
    and X² is chi-square with k degrees of freedom.
    """
    if not k > 0:
        raise ValueError(f"degrees of freedom must be positive, got {k}")
    return float(np.sqrt(s.generator.gamma(shape=k / 2.0, scale=2.0)))


def sample_exponential(s: RngStream) -> float:
    """One rate-1 exponential via the inverse CDF, −log(1−U)."""
    u = s.generator.random()
    return float(-np.log1p(-u))


def _chi_cdf(x, k):
    # Regularized lower incomplete gamma at (k/2, x²/2) is the chi CDF.
    return sc.gammainc(np.asarray(k) / 2.0, np.square(x) / 2.0)


def chi_quantile(u, k, rel_tol: float = 1e-12):
    """Chi quantile F⁻¹_{χ_k}(u) by bisection on the regularized incomplete
    gamma, to relative tolerance ``rel_tol``.

    Accepts scalars or broadcastable arrays; returns a matching shape
    (scalar inputs give a float).
    """
    u_arr = np.asarray(u, dtype=float)
    k_arr = np.asarray(k, dtype=float)
    if np.any((u_arr <= 0.0) | (u_arr >= 1.0)):
        raise ValueError("u must lie in the open interval (0, 1)")
    if np.any(k_arr <= 0.0):
        raise ValueError("degrees of freedom must be positive")

    u_b, k_b = np.broadcast_arrays(u_arr, k_arr)
    lo = np.zeros(u_b.shape)
    # Grow the upper bracket until the CDF exceeds u everywhere.
    hi = np.sqrt(k_b) + 2.0
    for _ in range(200):
        short = _chi_cdf(hi, k_b) < u_b
        if not short.any():
            break
        hi = np.where(short, 2.0 * hi, hi)
    # Bisect; stop once the bracket is below rel_tol of its midpoint.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = _chi_cdf(mid, k_b) < u_b
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all((hi - lo) <= rel_tol * np.maximum(hi, 1e-300)):
            break
    out = 0.5 * (lo + hi)
    if np.isscalar(u) and np.isscalar(k):
        return float(out)
    return out


def chi_quantile_couple(u: float, k1: float, k2: float):
    """Monotone quantile coupling of two chi distributions.

    Returns ``(F⁻¹_{χ_{k1}}(u), F⁻¹_{χ_{k2}}(u))`` from the single uniform
    ``u``.  Since the chi family is stochastically increasing in its degrees
    of freedom, ``k2 ≥ k1`` implies the second coordinate dominates the first
    for every ``u`` — stochastic dominance realized pathwise.
    """
    q1 = chi_quantile(u, k1)
    q2 = chi_quantile(u, k2)
    return q1, q2
