"""Symmetric tridiagonal and lower-bidiagonal matrices, and the largest-
eigenvalue machinery built on them: Gershgorin bounds, Sturm counts,
bisection, and the three-term positivity recursion.

The recursion convention: with diagonal a_1..a_n, off-diagonal b_1..b_{n-1}
(= c_1..c_{n-1}) and c_n := 1, set u_0 = 0, u_1 = 1 and

    c_i * u_{i+1} = (lambda - a_i) * u_i - b_{i-1} * u_{i-1},   i = 1..n.

All u_i > 0 for 1 <= i <= n+1 exactly when lambda exceeds the largest
eigenvalue; the first index where positivity fails locates the sign change.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "SymTridiagonal",
    "LowerBidiagonal",
    "RecursionTrace",
    "gershgorin_bounds",
    "sturm_count",
    "sturm_count_batch",
    "lambda_max",
    "eigvec_recursion",
    "positivity_criterion",
    "bidiag_gram",
    "entrywise_gap",
]

# Underflow guard for LDL^T pivots; sign-preserving replacement magnitude.
_PIVOT_FLOOR = 1e-300
# Rescale threshold for the positivity recursion (growth is exponential
# above the spectrum; only signs and ratios matter).
_RESCALE_AT = 1e150


@dataclass(frozen=True)
class SymTridiagonal:
    """Real symmetric tridiagonal matrix stored as two arrays.

    ``diag`` has length n, ``offdiag`` length n-1.  Immutable; operations on
    it are pure functions.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.diag, dtype=float))
        e = np.asarray(self.offdiag, dtype=float).reshape(-1)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if e.shape[0] != max(d.shape[0] - 1, 0):
            raise ValueError(
                f"offdiag length {e.shape[0]} inconsistent with diag length {d.shape[0]}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        """Dense n x n array (test/oracle use only)."""
        a = np.diag(self.diag)
        if self.n > 1:
            a += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return a


@dataclass(frozen=True)
class LowerBidiagonal:
    """Real lower-bidiagonal matrix: ``diag`` length n, ``subdiag`` length n-1."""

    diag: np.ndarray
    subdiag: np.ndarray

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.diag, dtype=float))
        e = np.asarray(self.subdiag, dtype=float).reshape(-1)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "subdiag", e)
        if e.shape[0] != max(d.shape[0] - 1, 0):
            raise ValueError(
                f"subdiag length {e.shape[0]} inconsistent with diag length {d.shape[0]}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")

    @property
    def n(self) -> int:
        return self.diag.shape[0]

    def dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.n > 1:
            a += np.diag(self.subdiag, -1)
        return a


@dataclass(frozen=True)
class RecursionTrace:
    """Output of :func:`eigvec_recursion`.

    ``u`` holds (u_1, ..., u_{n+1}); entries may be jointly rescaled by a
    positive factor to avoid overflow, which preserves signs and ratios.
    ``first_nonpositive_index`` is the least subscript i >= 2 with u_i <= 0,
    or None when every entry is positive.
    """

    lam: float
    u: np.ndarray
    first_nonpositive_index: Optional[int]


def gershgorin_bounds(T: SymTridiagonal) -> tuple[float, float]:
    """Interval [lo, hi] containing every eigenvalue of ``T``.

    Row radius at i is |offdiag_{i-1}| + |offdiag_i| (missing terms zero);
    lo/hi are the extreme diagonal-entry +/- radius values.
    """
    r = np.zeros(T.n)
    if T.n > 1:
        ab = np.abs(T.offdiag)
        r[:-1] += ab
        r[1:] += ab
    return float(np.min(T.diag - r)), float(np.max(T.diag + r))


def sturm_count(T: SymTridiagonal, lam: float) -> int:
    """Number of eigenvalues of ``T`` strictly below ``lam``.

    Shifted LDL^T sign count: pivots d_1 = a_1 - lam,
    d_i = (a_i - lam) - b_{i-1}^2 / d_{i-1}; the count of negative pivots
    equals the count of eigenvalues below the shift.  Pivots inside
    (-1e-300, 1e-300) are replaced by +/-1e-300 keeping their sign (an exact
    zero counts as negative).
    """
    count = 0
    d = 1.0
    off2 = np.square(T.offdiag) if T.n > 1 else np.empty(0)
    for i in range(T.n):
        b2 = off2[i - 1] if i > 0 else 0.0
        d = (T.diag[i] - lam) - b2 / d
        if -_PIVOT_FLOOR < d < _PIVOT_FLOOR:
            d = _PIVOT_FLOOR if d > 0 else -_PIVOT_FLOOR
        if d < 0:
            count += 1
    return count


def sturm_count_batch(diags: np.ndarray, offdiags: np.ndarray, lam: float) -> np.ndarray:
    """Sturm counts for a batch of tridiagonal matrices at one shift.

    ``diags`` is (R, n) and ``offdiags`` is (R, n-1); returns an integer
    array of R counts.  Same pivot recurrence and underflow guard as
    :func:`sturm_count`, vectorized across the batch — this is what lets the
    tail drivers skip per-draw bisection.
    """
    diags = np.asarray(diags, dtype=float)
    R, n = diags.shape
    off2 = np.square(np.asarray(offdiags, dtype=float))
    count = np.zeros(R, dtype=np.int64)
    d = diags[:, 0] - lam
    tiny = np.abs(d) < _PIVOT_FLOOR
    if tiny.any():
        d = np.where(tiny, np.where(d > 0, _PIVOT_FLOOR, -_PIVOT_FLOOR), d)
    count += d < 0
    for i in range(1, n):
        d = (diags[:, i] - lam) - off2[:, i - 1] / d
        tiny = np.abs(d) < _PIVOT_FLOOR
        if tiny.any():
            d = np.where(tiny, np.where(d > 0, _PIVOT_FLOOR, -_PIVOT_FLOOR), d)
        count += d < 0
    return count


def lambda_max(T: SymTridiagonal, tol: Optional[float] = None) -> float:
    """Largest eigenvalue of ``T`` by Sturm-count bisection.

    Bisects the Gershgorin interval until its width drops below ``tol``
    (default: 1e-10 of the initial interval width, far below Monte Carlo
    noise).  The result is within ``tol`` of the true largest eigenvalue.
    """
    lo, hi = gershgorin_bounds(T)
    width = hi - lo
    if tol is None:
        tol = 1e-10 * max(width, 1.0)
    elif not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if width == 0.0:
        return lo
    n = T.n
    # Invariant: count(lo) < n <= "count(hi+)"; lambda_max stays in [lo, hi].
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if sturm_count(T, mid) < n:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def eigvec_recursion(T: SymTridiagonal, lam: float) -> RecursionTrace:
    """Run the three-term recursion at shift ``lam`` and record the trace.

    Requires strictly positive off-diagonal entries (the positivity
    criterion needs them).  Whenever the running values exceed 1e150 in
    magnitude the whole trace is rescaled by its maximum absolute value;
    signs and ratios, which are all the criterion uses, are unchanged.
    """
    if T.n > 1 and not np.all(T.offdiag > 0):
        raise ValueError("positivity recursion requires strictly positive offdiag entries")
    n = T.n
    u = np.empty(n + 1)
    u[0] = 1.0  # u_1
    u_prev, u_cur = 0.0, 1.0  # u_0, u_1
    first_bad: Optional[int] = None
    for i in range(1, n + 1):
        a_i = T.diag[i - 1]
        b_im1 = T.offdiag[i - 2] if i >= 2 else 0.0
        c_i = T.offdiag[i - 1] if i <= n - 1 else 1.0  # c_n := 1
        u_next = ((lam - a_i) * u_cur - b_im1 * u_prev) / c_i
        u[i] = u_next
        if first_bad is None and u_next <= 0.0:
            first_bad = i + 1  # subscript of u_{i+1}
        if abs(u_next) > _RESCALE_AT:
            scale = np.max(np.abs(u[: i + 1]))
            u[: i + 1] /= scale
            u_next /= scale
            u_cur /= scale
        u_prev, u_cur = u_cur, u_next
    return RecursionTrace(lam=float(lam), u=u, first_nonpositive_index=first_bad)


def positivity_criterion(T: SymTridiagonal, lam: float) -> bool:
    """True iff every u_i in the recursion trace is positive, i.e. iff
    ``lam`` exceeds the largest eigenvalue of ``T``."""
    return eigvec_recursion(T, lam).first_nonpositive_index is None


def bidiag_gram(B: LowerBidiagonal) -> SymTridiagonal:
    """Gram matrix B^T B of a lower-bidiagonal B, as a SymTridiagonal.

    diag_k = D_k^2 + C_k^2 (with C_n := 0), offdiag_k = C_k * D_{k+1}.
    """
    D = B.diag
    C = B.subdiag
    d = np.square(D)
    if B.n > 1:
        d[:-1] += np.square(C)
        e = C * D[1:]
    else:
        e = np.empty(0)
    return SymTridiagonal(diag=d, offdiag=e)


def entrywise_gap(T1: SymTridiagonal, T2: SymTridiagonal) -> float:
    """3 * max absolute difference over stored entries.

    By Gershgorin applied to T1 - T2 this dominates the spectral norm of the
    difference, hence (Weyl) the gap between the two largest eigenvalues.
    """
    if T1.n != T2.n:
        raise ValueError(f"dimension mismatch: {T1.n} vs {T2.n}")
    gap = np.max(np.abs(T1.diag - T2.diag)) if T1.n else 0.0
    if T1.n > 1:
        gap = max(gap, np.max(np.abs(T1.offdiag - T2.offdiag)))
    return 3.0 * float(gap)
