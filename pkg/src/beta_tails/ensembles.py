"""Hermite and Laguerre beta-ensemble samplers, their Gaussian-modified
variants, the largest-eigenvalue scaling maps, and the stochastic-domination
coupling.

Conventions (entries before the final 1/sqrt(beta) scaling):

    Hermite  H:  diagonal X_i ~ N(0,2), i = 1..n;
                 off-diagonal Y_i ~ chi_{beta*(n-i)}, i = 1..n-1.
    Laguerre B:  diagonal D_i ~ chi_{beta*(m-i+1)}, i = 1..n;
                 sub-diagonal C_i ~ chi_{beta*(n-i)}, i = 1..n-1;
                 the spectral object is the Gram matrix B^T B.

The "modified" variants replace the first p chi entries by their Gaussian
surrogates sqrt(dof) + zeta/sqrt(2) with zeta ~ N(0,1); quadratic forms in
the modified block are then exactly Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as sc

from .core_rand import RngStream, chi_quantile, chi_quantile_couple
from .tridiag import LowerBidiagonal, SymTridiagonal, bidiag_gram, lambda_max

__all__ = [
    "EnsembleSpec",
    "ScaledStatistic",
    "hermite_spec",
    "laguerre_spec",
    "sample_hermite",
    "sample_laguerre",
    "sample_hermite_modified",
    "sample_laguerre_modified",
    "coupled_original_modified",
    "hermite_scaled_value",
    "hermite_raw_value",
    "laguerre_scaled_value",
    "laguerre_raw_value",
    "hermite_scaled_max",
    "laguerre_scaled_max",
    "scaling_constants",
    "domination_pair",
    "hermite_batch",
    "laguerre_gram_batch",
]


@dataclass(frozen=True)
class EnsembleSpec:
    """Parameters that fully determine a sampler.

    ``kind`` is "hermite" or "laguerre"; ``m`` (Laguerre only) may be any
    real > n-1, non-integer values included; ``p`` is the Gaussian
    modification depth, 0 <= p <= n (p = 0 means unmodified).
    """

    beta: float
    n: int
    kind: str
    m: Optional[float] = None
    p: int = 0

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.kind not in ("hermite", "laguerre"):
            raise ValueError(f"kind must be 'hermite' or 'laguerre', got {self.kind!r}")
        if self.kind == "laguerre":
            if self.m is None:
                raise ValueError("laguerre spec requires m")
            if not self.m > self.n - 1:
                raise ValueError(f"need m > n - 1, got m={self.m}, n={self.n}")
        if not 0 <= self.p <= self.n:
            raise ValueError(f"modification depth p must satisfy 0 <= p <= n, got {self.p}")


def hermite_spec(beta: float, n: int, p: int = 0) -> EnsembleSpec:
    return EnsembleSpec(beta=beta, n=n, kind="hermite", p=p)


def laguerre_spec(beta: float, n: int, m: float, p: int = 0) -> EnsembleSpec:
    return EnsembleSpec(beta=beta, n=n, kind="laguerre", m=m, p=p)


@dataclass(frozen=True)
class ScaledStatistic:
    """A raw largest eigenvalue together with its scaled image."""

    raw_lambda_max: float
    scaled: float
    spec: EnsembleSpec


def _hermite_offdiag_dofs(beta: float, n: int) -> np.ndarray:
    # dof of the i-th off-diagonal chi, i = 1..n-1
    return beta * (n - np.arange(1, n, dtype=float))


def sample_hermite(spec: EnsembleSpec, s: RngStream) -> SymTridiagonal:
    """One draw of the Hermite tridiagonal model (unmodified)."""
    if spec.kind != "hermite" or spec.p != 0:
        raise ValueError("sample_hermite requires a hermite spec with p = 0")
    g = s.generator
    rb = math.sqrt(spec.beta)
    diag = g.normal(0.0, math.sqrt(2.0), spec.n) / rb
    if spec.n > 1:
        dofs = _hermite_offdiag_dofs(spec.beta, spec.n)
        off = np.sqrt(g.gamma(shape=dofs / 2.0, scale=2.0)) / rb
    else:
        off = np.empty(0)
    return SymTridiagonal(diag=diag, offdiag=off)


def sample_laguerre(spec: EnsembleSpec, s: RngStream) -> LowerBidiagonal:
    """One draw of the Laguerre bidiagonal factor B (unmodified)."""
    if spec.kind != "laguerre" or spec.p != 0:
        raise ValueError("sample_laguerre requires a laguerre spec with p = 0")
    g = s.generator
    rb = math.sqrt(spec.beta)
    d_dofs = spec.beta * (spec.m - np.arange(1, spec.n + 1, dtype=float) + 1.0)
    diag = np.sqrt(g.gamma(shape=d_dofs / 2.0, scale=2.0)) / rb
    if spec.n > 1:
        c_dofs = spec.beta * (spec.n - np.arange(1, spec.n, dtype=float))
        sub = np.sqrt(g.gamma(shape=c_dofs / 2.0, scale=2.0)) / rb
    else:
        sub = np.empty(0)
    return LowerBidiagonal(diag=diag, subdiag=sub)


def sample_hermite_modified(spec: EnsembleSpec, s: RngStream) -> SymTridiagonal:
    """Draw with the first ``spec.p`` off-diagonal chis replaced by their
    Gaussian surrogates (sqrt(beta(n-i)) + zeta_i/sqrt(2)) / sqrt(beta)."""
    if spec.kind != "hermite":
        raise ValueError("sample_hermite_modified requires a hermite spec")
    g = s.generator
    n, beta, p = spec.n, spec.beta, min(spec.p, spec.n - 1)
    rb = math.sqrt(beta)
    diag = g.normal(0.0, math.sqrt(2.0), n) / rb
    if n > 1:
        dofs = _hermite_offdiag_dofs(beta, n)
        off = np.empty(n - 1)
        if p > 0:
            zeta = g.standard_normal(p)
            off[:p] = (np.sqrt(dofs[:p]) + zeta / math.sqrt(2.0)) / rb
        if p < n - 1:
            off[p:] = np.sqrt(g.gamma(shape=dofs[p:] / 2.0, scale=2.0)) / rb
    else:
        off = np.empty(0)
    return SymTridiagonal(diag=diag, offdiag=off)


def sample_laguerre_modified(spec: EnsembleSpec, s: RngStream) -> LowerBidiagonal:
    """Laguerre draw with the first ``spec.p`` diagonal and sub-diagonal
    chis replaced by Gaussian surrogates, with independent noise families.

    Diagonal surrogate dof: beta*(m+1-i); sub-diagonal: beta*(n-i).
    """
    if spec.kind != "laguerre":
        raise ValueError("sample_laguerre_modified requires a laguerre spec")
    g = s.generator
    n, m, beta = spec.n, spec.m, spec.beta
    rb = math.sqrt(beta)
    p_d = min(spec.p, n)
    p_c = min(spec.p, n - 1)
    d_dofs = beta * (m - np.arange(1, n + 1, dtype=float) + 1.0)
    diag = np.empty(n)
    if p_d > 0:
        zeta = g.standard_normal(p_d)
        diag[:p_d] = (np.sqrt(d_dofs[:p_d]) + zeta / math.sqrt(2.0)) / rb
    if p_d < n:
        diag[p_d:] = np.sqrt(g.gamma(shape=d_dofs[p_d:] / 2.0, scale=2.0)) / rb
    if n > 1:
        c_dofs = beta * (n - np.arange(1, n, dtype=float))
        sub = np.empty(n - 1)
        if p_c > 0:
            zeta2 = g.standard_normal(p_c)
            sub[:p_c] = (np.sqrt(c_dofs[:p_c]) + zeta2 / math.sqrt(2.0)) / rb
        if p_c < n - 1:
            sub[p_c:] = np.sqrt(g.gamma(shape=c_dofs[p_c:] / 2.0, scale=2.0)) / rb
    else:
        sub = np.empty(0)
    return LowerBidiagonal(diag=diag, subdiag=sub)


def coupled_original_modified(
    spec: EnsembleSpec, s: RngStream
) -> tuple[SymTridiagonal, SymTridiagonal]:
    """A coupled pair (H, H_modified) agreeing beyond index p.

    For i <= p one standard normal zeta_i drives both matrices: the modified
    entry is its Gaussian surrogate, the original entry is the chi draw
    obtained by mapping zeta_i through the Gaussian CDF and the chi quantile
    (a monotone quantile coupling, so both marginals are exact and the two
    entries are comonotone).  Beyond p the matrices share identical draws.
    """
    if spec.kind != "hermite":
        raise ValueError("coupled_original_modified requires a hermite spec")
    g = s.generator
    n, beta, p = spec.n, spec.beta, min(spec.p, spec.n - 1)
    rb = math.sqrt(beta)
    diag = g.normal(0.0, math.sqrt(2.0), n) / rb
    if n > 1:
        dofs = _hermite_offdiag_dofs(beta, n)
        off_orig = np.empty(n - 1)
        off_mod = np.empty(n - 1)
        if p > 0:
            zeta = g.standard_normal(p)
            off_mod[:p] = (np.sqrt(dofs[:p]) + zeta / math.sqrt(2.0)) / rb
            off_orig[:p] = chi_quantile(sc.ndtr(zeta), dofs[:p]) / rb
        if p < n - 1:
            shared = np.sqrt(g.gamma(shape=dofs[p:] / 2.0, scale=2.0)) / rb
            off_orig[p:] = shared
            off_mod[p:] = shared
    else:
        off_orig = off_mod = np.empty(0)
    original = SymTridiagonal(diag=diag, offdiag=off_orig)
    modified = SymTridiagonal(diag=diag.copy(), offdiag=off_mod)
    return original, modified


# ---------------------------------------------------------------------------
# Scaling maps.  Both are affine bijections of the raw largest eigenvalue for
# a fixed spec; the *_raw_value functions invert them exactly.


def hermite_scaled_value(n: int, raw: float) -> float:
    """(raw / sqrt(n) - 2) * n^(2/3)."""
    return (raw / math.sqrt(n) - 2.0) * n ** (2.0 / 3.0)


def hermite_raw_value(n: int, scaled: float) -> float:
    return (scaled * n ** (-2.0 / 3.0) + 2.0) * math.sqrt(n)


def laguerre_scaled_value(n: int, m: float, raw: float) -> float:
    """(sqrt(mn))^(1/3) * (sqrt(m)+sqrt(n))^(2/3) * (raw/(sqrt(m)+sqrt(n))^2 - 1)."""
    sm, sn = math.sqrt(m), math.sqrt(n)
    return (sm * sn) ** (1.0 / 3.0) * (sm + sn) ** (2.0 / 3.0) * (raw / (sm + sn) ** 2 - 1.0)


def laguerre_raw_value(n: int, m: float, scaled: float) -> float:
    sm, sn = math.sqrt(m), math.sqrt(n)
    return ((sm + sn) ** 2) * (1.0 + scaled / ((sm * sn) ** (1.0 / 3.0) * (sm + sn) ** (2.0 / 3.0)))


def hermite_scaled_max(spec: EnsembleSpec, s: RngStream, tol: Optional[float] = None) -> ScaledStatistic:
    """Largest eigenvalue of one Hermite draw, raw and scaled."""
    T = sample_hermite(spec, s) if spec.p == 0 else sample_hermite_modified(spec, s)
    raw = lambda_max(T, tol)
    return ScaledStatistic(raw_lambda_max=raw, scaled=hermite_scaled_value(spec.n, raw), spec=spec)


def laguerre_scaled_max(spec: EnsembleSpec, s: RngStream, tol: Optional[float] = None) -> ScaledStatistic:
    """Largest eigenvalue of B^T B for one Laguerre draw, raw and scaled."""
    B = sample_laguerre(spec, s) if spec.p == 0 else sample_laguerre_modified(spec, s)
    raw = lambda_max(bidiag_gram(B), tol)
    return ScaledStatistic(
        raw_lambda_max=raw, scaled=laguerre_scaled_value(spec.n, spec.m, raw), spec=spec
    )


def scaling_constants(gamma: float) -> tuple[float, float]:
    """Laguerre edge constants for aspect ratio gamma = m/n >= 1:
    a = (1+sqrt(gamma))^2 and b = gamma^(-1/6) (1+sqrt(gamma))^(4/3)."""
    if gamma < 1:
        raise ValueError(f"gamma must be >= 1, got {gamma}")
    rg = math.sqrt(gamma)
    return (1.0 + rg) ** 2, gamma ** (-1.0 / 6.0) * (1.0 + rg) ** (4.0 / 3.0)


def domination_pair(beta: float, n: int, s: RngStream) -> tuple[SymTridiagonal, SymTridiagonal]:
    """Couple sqrt(2)*H_{N,2} (N = ceil(beta*n/2)) with sqrt(beta)*H_{n,beta}
    so the big matrix dominates samplewise.

    Shared standard normals give both matrices the same diagonal on the
    top-left n x n block; shared uniforms drive quantile-coupled chi draws,
    and 2(N-i) >= beta(n-i) for beta >= 2 makes every coupled off-diagonal
    of the big matrix at least as large.  Hence lambda_max(big) >=
    lambda_max(small) on every sample (entrywise dominance of nonnegative
    off-diagonals plus Cauchy interlacing for the extra block).
    """
    if beta < 2:
        raise ValueError(f"domination coupling needs beta >= 2, got {beta}")
    g = s.generator
    N = math.ceil(beta * n / 2.0)
    diag_big = g.normal(0.0, math.sqrt(2.0), N)
    diag_small = diag_big[:n].copy()

    off_big = np.empty(N - 1) if N > 1 else np.empty(0)
    off_small = np.empty(n - 1) if n > 1 else np.empty(0)
    if n > 1:
        u = g.random(n - 1)
        dof_small = beta * (n - np.arange(1, n, dtype=float))
        dof_big = 2.0 * (N - np.arange(1, n, dtype=float))
        off_small[:] = chi_quantile(u, dof_small)
        off_big[: n - 1] = chi_quantile(u, dof_big)
    if N > n:
        extra_dofs = 2.0 * (N - np.arange(n, N, dtype=float))
        off_big[n - 1 :] = np.sqrt(g.gamma(shape=extra_dofs / 2.0, scale=2.0))
    big = SymTridiagonal(diag=diag_big, offdiag=off_big)
    small = SymTridiagonal(diag=diag_small, offdiag=off_small)
    return big, small


# ---------------------------------------------------------------------------
# Batched entry samplers.  The tail drivers draw whole blocks of replicates
# at once and evaluate threshold indicators by batched Sturm counts; these
# return raw (R, n) entry arrays with one replicate per row.


def hermite_batch(spec: EnsembleSpec, s: RngStream, reps: int) -> tuple[np.ndarray, np.ndarray]:
    """``reps`` Hermite draws as stacked entry arrays (diags, offdiags)."""
    if spec.kind != "hermite" or spec.p != 0:
        raise ValueError("hermite_batch requires a hermite spec with p = 0")
    g = s.generator
    rb = math.sqrt(spec.beta)
    diags = g.normal(0.0, math.sqrt(2.0), (reps, spec.n)) / rb
    dofs = _hermite_offdiag_dofs(spec.beta, spec.n)
    offs = np.sqrt(g.gamma(shape=dofs / 2.0, scale=2.0, size=(reps, spec.n - 1))) / rb
    return diags, offs


def laguerre_gram_batch(spec: EnsembleSpec, s: RngStream, reps: int) -> tuple[np.ndarray, np.ndarray]:
    """``reps`` draws of the Laguerre Gram matrix B^T B as stacked
    (diags, offdiags) entry arrays."""
    if spec.kind != "laguerre" or spec.p != 0:
        raise ValueError("laguerre_gram_batch requires a laguerre spec with p = 0")
    g = s.generator
    n, m, beta = spec.n, spec.m, spec.beta
    d_dofs = beta * (m - np.arange(1, n + 1, dtype=float) + 1.0)
    D = np.sqrt(g.gamma(shape=d_dofs / 2.0, scale=2.0, size=(reps, n))) / math.sqrt(beta)
    c_dofs = beta * (n - np.arange(1, n, dtype=float))
    C = np.sqrt(g.gamma(shape=c_dofs / 2.0, scale=2.0, size=(reps, n - 1))) / math.sqrt(beta)
    diags = np.square(D)
    diags[:, :-1] += np.square(C)
    offs = C * D[:, 1:]
    return diags, offs
