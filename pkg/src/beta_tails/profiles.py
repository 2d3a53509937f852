"""Deterministic test-vector profiles, the Gaussian statistics of quadratic
forms in modified ensembles, Riemann-sum limit checks, and the discrete
Riccati walk used for left-tail survival estimates.

Two profile families:

* the sech bump (right-tail work): a sech envelope of width ~ 2 sqrt(t) with
  slope-1 linear flanks tying it continuously to zero, sampled on the grid
  x_k = k sqrt(t) / n^(1/3);
* the left-tail tent g_t(x) = min(x sqrt(t), sqrt((t-x)+), (t-x)+),
  sampled on x_k = k / n^(1/3) (an optional step factor serves the
  rectangular-aspect consumers).

Quadratic forms <H_mod v, v> over the modified block are exactly Gaussian;
their mean and variance have the closed forms implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core_rand import RngStream
from .tridiag import SymTridiagonal

__all__ = [
    "ProfileVector",
    "WalkTrace",
    "rho_t",
    "sech_profile_value",
    "left_profile_value",
    "sech_profile",
    "left_profile",
    "qform",
    "qform_gaussian_stats",
    "riemann_limits",
    "riccati_walk",
    "corridor_probability",
]


@dataclass(frozen=True)
class ProfileVector:
    """A nonnegative test vector v(1)..v(n), zero beyond ``support_p``.

    ``kind`` records which constructor built it ("sech" or "left");
    ``tau1``/``tau2`` are the sech window boundary indices (floor/ceil of
    the flank boundaries over the grid step), kept because the windowed
    gradient sum needs them.
    """

    values: np.ndarray
    support_p: int
    n: int
    t: float
    kind: str
    tau1: Optional[int] = None
    tau2: Optional[int] = None

    def __post_init__(self):
        if np.any(self.values[: self.support_p] < 0):
            raise ValueError("profile values must be nonnegative")

    @property
    def support(self) -> np.ndarray:
        """View of v(1)..v(support_p)."""
        return self.values[: self.support_p]


@dataclass(frozen=True)
class WalkTrace:
    """Trajectory of the discrete Riccati walk: W(1)..W(p), the parameters
    it was run with, and whether it stayed above 1 throughout."""

    W: np.ndarray
    params: tuple  # (n, beta, t)
    survived: bool


def rho_t(t: float) -> float:
    """Positive root of x^2 t + x - t = 0, i.e. (-1 + sqrt(1+4t^2))/(2t).

    Lies in (0, 1) and tends to 1 as t grows; the crossover point of the
    left-tail tent.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    return (-1.0 + math.sqrt(1.0 + 4.0 * t * t)) / (2.0 * t)


def sech_profile_value(x, t: float):
    """The continuous sech envelope f_t evaluated at x (scalar or array).

    sech(x - sqrt(t) - sech(sqrt(t))) on [sech(sqrt(t)), 2 sqrt(t) +
    sech(sqrt(t))], linear with slope +-1 down to 0 on either side, zero
    outside [0, g(t)] with g(t) = 2 sqrt(t) + 2 sech(sqrt(t)).
    """
    rt = math.sqrt(t)
    s = 1.0 / math.cosh(rt)
    g = 2.0 * rt + 2.0 * s
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    left = (x >= 0) & (x < s)
    mid = (x >= s) & (x <= 2.0 * rt + s)
    right = (x > 2.0 * rt + s) & (x < g)
    out[left] = x[left]
    out[mid] = 1.0 / np.cosh(x[mid] - rt - s)
    out[right] = g - x[right]
    return out if out.ndim else float(out)


def left_profile_value(x, t: float):
    """The left-tail tent g_t(x) = min(x sqrt(t), sqrt((t-x)+), (t-x)+)."""
    x = np.asarray(x, dtype=float)
    pos = np.maximum(t - x, 0.0)
    out = np.minimum(np.minimum(x * math.sqrt(t), np.sqrt(pos)), pos)
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def sech_profile(n: int, t: float) -> ProfileVector:
    """Sech profile on the grid x_k = k sqrt(t)/n^(1/3), k = 1..p, with
    p = ceil((2 sqrt(t) + 2 sech(sqrt(t))) n^(1/3)/sqrt(t))."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    n13 = n ** (1.0 / 3.0)
    rt = math.sqrt(t)
    s = 1.0 / math.cosh(rt)
    p = math.ceil((2.0 * rt + 2.0 * s) * n13 / rt)
    if p > n:
        raise ValueError(f"profile support p={p} exceeds n={n}; t too large for this n")
    h = rt / n13
    k = np.arange(1, p + 1, dtype=float)
    values = np.zeros(n)
    values[:p] = sech_profile_value(k * h, t)
    tau1 = math.floor(s * n13 / rt)
    tau2 = math.ceil((2.0 * rt + s) * n13 / rt)
    return ProfileVector(values=values, support_p=p, n=n, t=t, kind="sech", tau1=tau1, tau2=tau2)


def left_profile(n: int, t: float, step: float = 1.0) -> ProfileVector:
    """Left-tail tent on the grid x_k = k*step/n^(1/3), k = 1..p, with
    p = floor(t n^(1/3)/step).  ``step`` defaults to 1 (square aspect);
    rectangular-aspect consumers pass their own step."""
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    n13 = n ** (1.0 / 3.0)
    p = math.floor(t * n13 / step)
    if p > n:
        raise ValueError(f"profile support p={p} exceeds n={n}; t too large for this n")
    k = np.arange(1, p + 1, dtype=float)
    values = np.zeros(n)
    values[:p] = left_profile_value(k * step / n13, t)
    return ProfileVector(values=values, support_p=p, n=n, t=t, kind="left")


def qform(T: SymTridiagonal, v: ProfileVector) -> float:
    """<T v, v> = sum diag_k v_k^2 + 2 sum offdiag_k v_k v_{k+1}."""
    if v.n != T.n:
        raise ValueError(f"dimension mismatch: profile n={v.n}, matrix n={T.n}")
    q = min(v.support_p, T.n)
    vals = v.values[:q]
    out = float(np.dot(T.diag[:q], np.square(vals)))
    if q > 1:
        out += 2.0 * float(np.dot(T.offdiag[: q - 1], vals[:-1] * vals[1:]))
    return out


def qform_gaussian_stats(n: int, beta: float, p: int, v: ProfileVector) -> tuple[float, float]:
    """Exact mean and variance of the Gaussian <H_mod v, v> for a profile
    supported inside the modified block (support_p <= p <= n).

        mu      = 2 sum_{k=1}^{p-1} sqrt(n-k) v(k) v(k+1)
        sigma^2 = (4/beta) sum v(k)^4
                  - (1/beta) sum_{k=0}^{p} (v(k+1)^2 - v(k)^2)^2

    with v(0) = v(p+1) = 0.
    """
    if v.support_p > p:
        raise ValueError(
            f"profile support {v.support_p} escapes the modified block p={p}; "
            "the quadratic form is then not Gaussian"
        )
    if p > n:
        raise ValueError(f"modified depth p={p} exceeds n={n}")
    q = v.support_p
    # vv holds v(0)..v(p+1) with both end zeros in place.
    vv = np.zeros(p + 2)
    vv[1 : q + 1] = v.values[:q]
    ks = np.arange(1, p, dtype=float)
    mu = 2.0 * float(np.dot(np.sqrt(n - ks), vv[1:p] * vv[2 : p + 1]))
    v2 = np.square(vv)
    sigma2 = (4.0 / beta) * float(np.sum(np.square(v2[1 : p + 1]))) - (1.0 / beta) * float(
        np.sum(np.square(np.diff(v2)))
    )
    return mu, sigma2


# Integral constants behind the sech predictions: int sech^2 = 2 and
# int sech^4 = 4/3 (tanh and tanh - tanh^3/3 antiderivatives).
SECH2_INTEGRAL = 2.0
SECH4_INTEGRAL = 4.0 / 3.0


def riemann_limits(v: ProfileVector, which: str) -> tuple[float, float]:
    """Computed sum vs. asymptotic prediction for a sech profile.

    which:
        "L2"          sum v^2            -> 2 n^(1/3)/sqrt(t)
        "L4"          sum v^4            -> (4/3) n^(1/3)/sqrt(t)
        "grad2"       windowed sum of (v(k+1)-v(k))^2 over the sech window
                      (k = tau1+1 .. tau2-2)  -> (2/3) sqrt(t)/n^(1/3)
        "k_weighted"  sum k v(k)^2       -> 2 n^(2/3)/sqrt(t)

    The gradient sum runs over the sech window only — the slope-1 flanks
    carry a separately vanishing contribution and are excluded from the
    limit statement.
    """
    if v.kind != "sech":
        raise ValueError("riemann_limits is defined for sech profiles")
    n13 = v.n ** (1.0 / 3.0)
    rt = math.sqrt(v.t)
    vals = v.support
    if which == "L2":
        return float(np.sum(np.square(vals))), SECH2_INTEGRAL * n13 / rt
    if which == "L4":
        return float(np.sum(np.square(np.square(vals)))), SECH4_INTEGRAL * n13 / rt
    if which == "grad2":
        # d/dx sech = -sech tanh; int (sech')^2 = int sech^2 - sech^4 = 2/3.
        lo, hi = v.tau1 + 1, v.tau2 - 1  # window indices (1-based k)
        w = vals[lo - 1 : hi]  # v(tau1+1) .. v(tau2-1)
        return float(np.sum(np.square(np.diff(w)))), (SECH2_INTEGRAL - SECH4_INTEGRAL) * rt / n13
    if which == "k_weighted":
        k = np.arange(1, v.support_p + 1, dtype=float)
        return float(np.dot(k, np.square(vals))), SECH2_INTEGRAL * v.n ** (2.0 / 3.0) / rt
    raise ValueError(f"unknown riemann limit kind {which!r}")


def _riccati_sigma(W: np.ndarray, k: int, n: int) -> np.ndarray:
    # sigma_k^2(x) = 1/2 + (1 - k/n) / (2 (1 + n^(-1/3) x)^2)
    return np.sqrt(0.5 + (1.0 - k / n) / (2.0 * np.square(1.0 + n ** (-1.0 / 3.0) * W)))


def _riccati_drift(W: np.ndarray, k: int, n: int, t: float) -> np.ndarray:
    n13 = n ** (1.0 / 3.0)
    return (
        -t / n13
        - np.square(W) / (n13 + W)
        + k / (n ** (2.0 / 3.0) * (1.0 + W / n13))
    )


def riccati_walk(
    n: int, beta: float, t: float, s: Optional[RngStream], noise: Optional[np.ndarray] = None
) -> WalkTrace:
    """One trajectory of the discrete Riccati walk.

    Starts at W(1) = 5 and runs to p = floor(t n^(1/3)) steps:

        W(k+1) - W(k) = -t n^(-1/3) - W(k)^2/(n^(1/3) + W(k))
                        + k / (n^(2/3) (1 + n^(-1/3) W(k)))
                        - (2 / (sqrt(beta) n^(1/6))) sigma_k(W(k)) Z(k)

    with sigma_k^2(x) = 1/2 + (1 - k/n)/(2 (1 + n^(-1/3) x)^2) and Z i.i.d.
    standard normal.  ``survived`` records whether W(k) > 1 for every
    k <= p.  The sensible regime is t of order at most n^(1/9); ``noise``
    may supply the Z values directly (e.g. zeros for the deterministic
    skeleton).
    """
    p = math.floor(t * n ** (1.0 / 3.0))
    if p > n:
        raise ValueError(f"walk length p={p} exceeds n={n}")
    if p <= 0:
        return WalkTrace(W=np.empty(0), params=(n, beta, t), survived=True)
    if noise is None:
        noise = s.generator.standard_normal(p - 1)
    elif len(noise) < p - 1:
        raise ValueError(f"need at least {p - 1} noise values, got {len(noise)}")
    W = np.empty(p)
    W[0] = 5.0
    coef = 2.0 / (math.sqrt(beta) * n ** (1.0 / 6.0))
    w = np.array([5.0])
    for k in range(1, p):
        w = w + _riccati_drift(w, k, n, t) - coef * _riccati_sigma(w, k, n) * noise[k - 1]
        W[k] = w[0]
    return WalkTrace(W=W, params=(n, beta, t), survived=bool(np.all(W > 1.0)))


def corridor_probability(
    beta: float, t: float, n: int, reps: int, s: RngStream
) -> tuple[float, tuple[float, float]]:
    """Monte Carlo estimate of the walk's survival probability
    P(W(k) > 1 for all k <= p), with a Wilson 95% interval.

    Vectorizes the recursion across replicates; deterministic given the
    stream.
    """
    from .stats import wilson_interval

    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    p = math.floor(t * n ** (1.0 / 3.0))
    if p > n:
        raise ValueError(f"walk length p={p} exceeds n={n}")
    if p <= 0:
        return 1.0, wilson_interval(reps, reps)
    coef = 2.0 / (math.sqrt(beta) * n ** (1.0 / 6.0))
    W = np.full(reps, 5.0)
    alive = np.ones(reps, dtype=bool)
    for k in range(1, p):
        Z = s.generator.standard_normal(reps)
        W = W + _riccati_drift(W, k, n, t) - coef * _riccati_sigma(W, k, n) * Z
        alive &= W > 1.0
    successes = int(np.sum(alive))
    return successes / reps, wilson_interval(successes, reps)
