"""Exponential last passage percolation: coupled weight fields, the four
passage-time variants, geodesics, and the geometric statistics built on them.

Weights are Exp(1), addressed by lattice coordinates: ``weight(i, j)`` is a
pure function of ``(master_seed, i, j)``.  One field therefore couples every
statistic computed from it — the same weights underlie T_m for all m, which
is what the running-extrema trajectories require.  Half-space fields
symmetrize across the diagonal: weight(i, j) = weight(j, i) for i != j, the
diagonal kept as sampled (an experimental ``zero_diagonal`` option zeroes
it).

Dynamic programming uses the scalar recursion

    G(x) = w(x) + max(G(up), G(left))

evaluated in a fixed order (numba kernels, row-major sweeps), which makes DP
values, geodesic weights, and rerun outputs bit-identical.  Ties in the max
prefer the up predecessor (i-1, j).

Vertex-counting conventions: "include_both", "exclude_initial" (default),
"exclude_final".  Under "exclude_final" values are extracted as the max over
the final vertex's predecessors rather than by subtracting the final weight,
so they stay on the same float lattice as the other conventions.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass

import numpy as np
from numba import njit

__all__ = [
    "CONVENTIONS",
    "DEFAULT_CONVENTION",
    "WeightField",
    "Geodesic",
    "phi",
    "psi",
    "passage_p2p",
    "passage_p2l",
    "passage_l2p",
    "passage_halfspace",
    "geodesic",
    "geodesic_crossing",
    "interval_to_point",
    "constrained_passage",
    "diagonal_passage_profile",
    "p2l_passage_profile",
    "l2p_passage_profile",
    "running_min_statistic",
    "path_weight",
    "lil_normalize",
    "g_plus",
    "g_minus",
]

CONVENTIONS = ("include_both", "exclude_initial", "exclude_final")
DEFAULT_CONVENTION = "exclude_initial"

_MASK64 = (1 << 64) - 1
_COL_OFFSET = 1 << 32  # stream position of lattice column 0 within a row
_FIELD_DOMAIN = 0x8A5CD789635D2DFF  # domain separator vs. other stream keys
_BLOCK_CELLS_LIMIT = 50_000_000


def _check_convention(c: str) -> None:
    if c not in CONVENTIONS:
        raise ValueError(f"unknown convention {c!r}; valid: {CONVENTIONS}")


def phi(u) -> int:
    """Time coordinate u1 + u2."""
    return int(u[0]) + int(u[1])


def psi(u) -> int:
    """Space coordinate u1 - u2."""
    return int(u[0]) - int(u[1])


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (x ^ (x >> 31)) & _MASK64


class WeightField:
    """Deterministic, seed-addressed lattice of Exp(1) vertex weights.

    Row i is a counter-based stream keyed by (master_seed, i); the weight at
    column j sits at a fixed position of that stream, so segments of any row
    can be produced independently, in any order, on any worker, with
    identical values.  Coordinates may be negative down to ``-margin``.

    ``half_space=True`` presents the symmetrized field (mirror across the
    diagonal; the diagonal itself as sampled unless ``zero_diagonal``).  A
    tile cache backs scalar ``weight`` queries; ``cache_dir`` persists tiles
    on disk across processes.
    """

    def __init__(
        self,
        master_seed: int,
        half_space: bool = False,
        zero_diagonal: bool = False,
        margin: int = 1 << 31,
        cache_dir: str | None = None,
        tile_size: int = 256,
    ):
        if zero_diagonal and not half_space:
            raise ValueError("zero_diagonal is an option of half-space fields")
        if not 0 <= margin <= _COL_OFFSET // 2:
            raise ValueError(f"margin must be in [0, {_COL_OFFSET // 2}]")
        if tile_size < 1:
            raise ValueError("tile_size must be positive")
        self.master_seed = int(master_seed)
        self.half_space = bool(half_space)
        self.zero_diagonal = bool(zero_diagonal)
        self.margin = int(margin)
        self.tile_size = int(tile_size)
        self._tiles: dict = {}
        self._lock = threading.Lock()
        self._cache_dir = cache_dir

    # -- raw (unsymmetrized) addressing ------------------------------------

    def _row_key(self, i: int) -> int:
        a = _splitmix64(self.master_seed ^ _FIELD_DOMAIN)
        b = _splitmix64(a ^ (i & _MASK64))
        c = _splitmix64(b ^ 0x6C62272E07BB0142)
        return b | (c << 64)

    def _check_coords(self, i0: int, j0: int) -> None:
        if i0 < -self.margin or j0 < -self.margin:
            raise ValueError(
                f"coordinates below the field margin -{self.margin}: ({i0}, {j0})"
            )

    def _raw_row(self, i: int, j0: int, j1: int) -> np.ndarray:
        """Exp(1) weights of the *unsymmetrized* field at (i, j0..j1-1)."""
        if j1 <= j0:
            return np.empty(0)
        self._check_coords(i, j0)
        pos = j0 + _COL_OFFSET
        bg = np.random.Philox(key=self._row_key(i))
        bg.advance(pos // 4)
        gen = np.random.Generator(bg)
        pre = pos % 4
        u = gen.random(pre + (j1 - j0))
        if pre:
            u = u[pre:]
        return -np.log1p(-u)

    # -- public views -------------------------------------------------------

    def upper_row(self, i: int, j0: int, j1: int) -> np.ndarray:
        """Row segment for sweeps that stay weakly above the diagonal
        (j0 >= i), where the symmetrized field equals the raw one."""
        w = self._raw_row(i, j0, j1)
        if self.zero_diagonal and j0 <= i < j1:
            w[i - j0] = 0.0
        return w

    def row(self, i: int, j0: int, j1: int) -> np.ndarray:
        """Weights at (i, j0..j1-1) of the field (symmetrized if half-space).

        Full-plane rows stream in one shot.  Half-space rows that dip below
        the diagonal gather mirrored entries column by column — fine at the
        small sizes where such rows arise; bulk half-space sweeps use
        :meth:`upper_row` instead.
        """
        if not self.half_space:
            return self._raw_row(i, j0, j1)
        return self.block(i, i + 1, j0, j1)[0]

    def block(self, i0: int, i1: int, j0: int, j1: int) -> np.ndarray:
        """Dense (i1-i0) x (j1-j0) block of field weights."""
        h, w = i1 - i0, j1 - j0
        if h <= 0 or w <= 0:
            return np.empty((max(h, 0), max(w, 0)))
        self._check_coords(i0, j0)
        if h * w > _BLOCK_CELLS_LIMIT:
            raise ValueError(f"block of {h}x{w} cells exceeds the materialization limit")
        upper = np.stack([self._raw_row(i, j0, j1) for i in range(i0, i1)])
        if not self.half_space:
            return upper
        mirror = np.stack([self._raw_row(j, i0, i1) for j in range(j0, j1)])
        ii = np.arange(i0, i1)[:, None]
        jj = np.arange(j0, j1)[None, :]
        out = np.where(jj >= ii, upper, mirror.T)
        if self.zero_diagonal:
            out[ii == jj] = 0.0
        return out

    def weight(self, i: int, j: int) -> float:
        """Scalar weight at (i, j), via the tile cache."""
        i, j = int(i), int(j)
        self._check_coords(i, j)
        T = self.tile_size
        ti, tj = i // T, j // T
        key = (ti, tj)
        tile = self._tiles.get(key)
        if tile is None:
            with self._lock:
                tile = self._tiles.get(key)
                if tile is None:
                    tile = self._load_or_build_tile(ti, tj)
                    self._tiles[key] = tile
        return float(tile[i - ti * T, j - tj * T])

    def _load_or_build_tile(self, ti: int, tj: int) -> np.ndarray:
        T = self.tile_size
        path = None
        if self._cache_dir:
            tag = f"{self.master_seed}_{int(self.half_space)}{int(self.zero_diagonal)}"
            path = os.path.join(self._cache_dir, f"tile_{tag}_{ti}_{tj}_{T}.npy")
            if os.path.exists(path):
                return np.load(path)
        tile = self.block(ti * T, (ti + 1) * T, tj * T, (tj + 1) * T)
        if path is not None:
            os.makedirs(self._cache_dir, exist_ok=True)
            tmp = f"{path}.{os.getpid()}.tmp.npy"
            np.save(tmp, tile)
            os.replace(tmp, path)
        return tile


# ---------------------------------------------------------------------------
# DP kernels.  All use the same scalar update run = w + max(up, left) with
# ties preferring up, so every engine produces identical floats.


@njit(cache=True, nogil=True)
def _dp_first_row(w, out):
    # out[0] preset by the caller; pure left-to-right accumulation.
    for j in range(1, w.shape[0]):
        out[j] = w[j] + out[j - 1]


@njit(cache=True, nogil=True)
def _dp_row(w, prev, out, carry):
    # out[j] = w[j] + max(prev[j], out[j-1]), with carry playing out[-1].
    run = carry
    for j in range(w.shape[0]):
        up = prev[j]
        m = up if up >= run else run
        run = w[j] + m
        out[j] = run


@njit(cache=True, nogil=True)
def _dp_row_origin(w, prev, out, prev_org, org, carry, carry_org):
    # As _dp_row, propagating the origin label of the argmax predecessor.
    run = carry
    run_org = carry_org
    for j in range(w.shape[0]):
        up = prev[j]
        if up >= run:
            m = up
            o = prev_org[j]
        else:
            m = run
            o = run_org
        run = w[j] + m
        run_org = o
        out[j] = run
        org[j] = o


@njit(cache=True, nogil=True)
def _dp_table(W, init0):
    h, w = W.shape
    G = np.empty((h, w))
    G[0, 0] = init0
    for j in range(1, w):
        G[0, j] = W[0, j] + G[0, j - 1]
    for i in range(1, h):
        G[i, 0] = W[i, 0] + G[i - 1, 0]
        for j in range(1, w):
            up = G[i - 1, j]
            left = G[i, j - 1]
            m = up if up >= left else left
            G[i, j] = W[i, j] + m
    return G


@njit(cache=True, nogil=True)
def _backtrack(G):
    # Maximizing path of a table DP, start to end; ties prefer (i-1, j).
    h, w = G.shape
    L = h + w - 1
    path = np.empty((L, 2), np.int64)
    i, j = h - 1, w - 1
    for idx in range(L - 1, -1, -1):
        path[idx, 0] = i
        path[idx, 1] = j
        if i > 0 and (j == 0 or G[i - 1, j] >= G[i, j - 1]):
            i -= 1
        elif j > 0:
            j -= 1
    return path


def _init_val(w0: float, c: str) -> float:
    # DP value at a path's start vertex under the convention.
    return 0.0 if c == "exclude_initial" else w0


def _degenerate_value(f: WeightField, u, c: str) -> float:
    # Single-vertex path: only include_both counts its weight.
    return f.weight(*u) if c == "include_both" else 0.0


# ---------------------------------------------------------------------------
# Passage times.


def passage_p2p(f: WeightField, u, v, c: str = DEFAULT_CONVENTION) -> float:
    """Point-to-point passage time from u to v (coordinatewise u <= v)."""
    _check_convention(c)
    u = (int(u[0]), int(u[1]))
    v = (int(v[0]), int(v[1]))
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise ValueError(f"endpoints not ordered: {u} !<= {v}")
    h, wd = v[0] - u[0] + 1, v[1] - u[1] + 1
    if h == 1 and wd == 1:
        return _degenerate_value(f, u, c)
    if f.half_space:
        W = f.block(u[0], v[0] + 1, u[1], v[1] + 1)
        G = _dp_table(W, _init_val(W[0, 0], c))
        if c == "exclude_final":
            up = G[-2, -1] if h > 1 else -np.inf
            left = G[-1, -2] if wd > 1 else -np.inf
            return float(max(up, left))
        return float(G[-1, -1])
    prev = np.empty(0)
    up_last = -np.inf
    for idx in range(h):
        wrow = f.row(u[0] + idx, u[1], v[1] + 1)
        out = np.empty(wd)
        if idx == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        else:
            if idx == h - 1:
                up_last = prev[-1]
            _dp_row(wrow, prev, out, -np.inf)
        prev = out
    if c == "exclude_final":
        left = prev[-2] if wd > 1 else -np.inf
        return float(max(up_last, left))
    return float(prev[-1])


def passage_p2l(f: WeightField, u, r: int, c: str = DEFAULT_CONVENTION):
    """Point-to-line passage time from u to the line phi = r.

    Returns ``(value, argmax_vertex)``; the argmax is the maximizing
    endpoint on L_r (first by first coordinate among exact ties).
    """
    _check_convention(c)
    u = (int(u[0]), int(u[1]))
    r = int(r)
    if r < phi(u):
        raise ValueError(f"target line phi={r} lies below the start (phi={phi(u)})")
    if r == phi(u):
        return _degenerate_value(f, u, c), u
    n_rows = r - u[1] - u[0] + 1  # rows u0 .. r - u1
    cands = np.empty(n_rows)
    prev = np.empty(0)
    for idx in range(n_rows):
        i = u[0] + idx
        width = r - i - u[1] + 1
        wrow = f.row(i, u[1], r - i + 1)
        out = np.empty(width)
        if idx == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        else:
            _dp_row(wrow, prev[:width], out, -np.inf)
        if c == "exclude_final":
            up = prev[width - 1] if idx > 0 else -np.inf
            left = out[width - 2] if width > 1 else -np.inf
            cands[idx] = max(up, left)
        else:
            cands[idx] = out[width - 1]
        prev = out
    best = int(np.argmax(cands))
    return float(cands[best]), (u[0] + best, r - (u[0] + best))


def passage_l2p(f: WeightField, r: int, v, c: str = DEFAULT_CONVENTION):
    """Line-to-point passage time from the line phi = r to v.

    Returns ``(value, argmax_vertex)``; the argmax is the maximizing start
    on L_r, tracked through the sweep with the same up-biased tie rule as
    the DP itself.
    """
    _check_convention(c)
    v = (int(v[0]), int(v[1]))
    r = int(r)
    if r > phi(v):
        raise ValueError(f"source line phi={r} lies above the endpoint (phi={phi(v)})")
    if r == phi(v):
        return _degenerate_value(f, v, c), v
    i_min = r - v[1]
    n_rows = v[0] - i_min + 1
    prev = np.empty(0)
    prev_org = np.empty(0, np.int64)
    up_val, up_org = -np.inf, i_min
    for idx in range(n_rows):
        i = i_min + idx
        width = idx + 1  # columns r-i .. v1
        wrow = f.row(i, r - i, v[1] + 1)
        out = np.empty(width)
        org = np.empty(width, np.int64)
        out[0] = _init_val(wrow[0], c)
        org[0] = i
        if width > 1:
            if idx == n_rows - 1:
                up_val, up_org = prev[-1], int(prev_org[-1])
            _dp_row_origin(wrow[1:], prev, out[1:], prev_org, org[1:], out[0], org[0])
        prev, prev_org = out, org
    if c == "exclude_final":
        left_val = prev[-2] if len(prev) > 1 else -np.inf
        if up_val >= left_val:
            val, a = up_val, up_org
        else:
            val, a = left_val, int(prev_org[-2])
        return float(val), (a, r - a)
    a = int(prev_org[-1])
    return float(prev[-1]), (a, r - a)


def passage_halfspace(f: WeightField, u, v, c: str = DEFAULT_CONVENTION) -> float:
    """Point-to-point passage time in a symmetrized (half-space) field.

    Large same-side instances run as a sweep constrained weakly above the
    diagonal — reflecting a path's below-diagonal excursions preserves its
    weight in a symmetric field, so the constrained and free passage times
    coincide.  Mixed-side endpoints fall back to the dense block engine.
    """
    _check_convention(c)
    if not f.half_space:
        raise ValueError("passage_halfspace requires a half-space field")
    u = (int(u[0]), int(u[1]))
    v = (int(v[0]), int(v[1]))
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise ValueError(f"endpoints not ordered: {u} !<= {v}")
    if u[0] >= u[1] and v[0] >= v[1]:
        # weakly below the diagonal: mirror the whole problem
        u, v = (u[1], u[0]), (v[1], v[0])
    if not (u[0] <= u[1] and v[0] <= v[1]):
        return passage_p2p(f, u, v, c)
    h = v[0] - u[0] + 1
    if h == 1 and v[1] == u[1]:
        return _degenerate_value(f, u, c)
    prev = np.empty(0)
    prev_j0 = u[1]
    up_last = -np.inf
    for idx in range(h):
        i = u[0] + idx
        j0 = max(u[1], i)
        wrow = f.upper_row(i, j0, v[1] + 1)
        out = np.empty(v[1] - j0 + 1)
        if idx == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        else:
            if idx == h - 1:
                up_last = prev[-1]
            _dp_row(wrow, prev[j0 - prev_j0 :], out, -np.inf)
        prev, prev_j0 = out, j0
    if c == "exclude_final":
        left = prev[-2] if len(prev) > 1 else -np.inf
        return float(max(up_last, left))
    return float(prev[-1])


@dataclass(frozen=True)
class Geodesic:
    """An up-right lattice path with its passage value and convention."""

    vertices: np.ndarray
    value: float
    convention: str

    def __post_init__(self):
        vt = np.asarray(self.vertices, dtype=np.int64)
        object.__setattr__(self, "vertices", vt)
        if vt.ndim != 2 or vt.shape[1] != 2 or vt.shape[0] < 1:
            raise ValueError("vertices must be a nonempty (L, 2) array")
        if vt.shape[0] > 1:
            steps = np.diff(vt, axis=0)
            ok = ((steps[:, 0] == 1) & (steps[:, 1] == 0)) | (
                (steps[:, 0] == 0) & (steps[:, 1] == 1)
            )
            if not np.all(ok):
                raise ValueError("consecutive vertices must differ by (1,0) or (0,1)")

    @property
    def start(self):
        return (int(self.vertices[0, 0]), int(self.vertices[0, 1]))

    @property
    def end(self):
        return (int(self.vertices[-1, 0]), int(self.vertices[-1, 1]))

    def phis(self) -> np.ndarray:
        return self.vertices[:, 0] + self.vertices[:, 1]

    def psis(self) -> np.ndarray:
        return self.vertices[:, 0] - self.vertices[:, 1]


def geodesic(f: WeightField, u, v, c: str = DEFAULT_CONVENTION) -> Geodesic:
    """The maximizing up-right path from u to v, with its passage value.

    The argmax path does not depend on the convention (every path's value
    shifts by the same start/end weight, preserving all comparisons); the
    reported value follows ``c`` and reproduces the DP value bit-exactly.
    """
    _check_convention(c)
    u = (int(u[0]), int(u[1]))
    v = (int(v[0]), int(v[1]))
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise ValueError(f"endpoints not ordered: {u} !<= {v}")
    h, wd = v[0] - u[0] + 1, v[1] - u[1] + 1
    if h == 1 and wd == 1:
        return Geodesic(
            vertices=np.array([[u[0], u[1]]], np.int64),
            value=_degenerate_value(f, u, c),
            convention=c,
        )
    W = f.block(u[0], v[0] + 1, u[1], v[1] + 1)
    G = _dp_table(W, _init_val(W[0, 0], c))
    path = _backtrack(G)
    if c == "exclude_final":
        up = G[-2, -1] if h > 1 else -np.inf
        left = G[-1, -2] if wd > 1 else -np.inf
        val = float(max(up, left))
    else:
        val = float(G[-1, -1])
    path = path + np.array([u[0], u[1]], np.int64)
    return Geodesic(vertices=path, value=val, convention=c)


def geodesic_crossing(g: Geodesic, r) -> tuple:
    """The path vertex on the line phi = r.

    An up-right path hits every integer phi in its range exactly once, so
    the crossing is unique; a non-integer r returns the last vertex below
    the line.
    """
    p0, p1 = phi(g.vertices[0]), phi(g.vertices[-1])
    if not p0 <= r <= p1:
        raise ValueError(f"line phi={r} outside the path's range [{p0}, {p1}]")
    idx = int(math.floor(r)) - p0
    return (int(g.vertices[idx, 0]), int(g.vertices[idx, 1]))


def path_weight(f: WeightField, vertices, c: str = DEFAULT_CONVENTION) -> float:
    """Recompute a path's weight in the engine's accumulation order
    (acc = w + acc along the path), so a geodesic's weight matches the DP
    value bit-exactly, not merely to rounding."""
    _check_convention(c)
    vt = np.asarray(vertices)
    last = vt.shape[0] - 1 if c == "exclude_final" else vt.shape[0]
    if last <= 0:
        return 0.0
    w0 = f.weight(int(vt[0, 0]), int(vt[0, 1]))
    acc = _init_val(w0, c)
    for k in range(1, last):
        acc = f.weight(int(vt[k, 0]), int(vt[k, 1])) + acc
    return float(acc)


def interval_to_point(
    f: WeightField, psi_halfwidth: float, v, c: str = DEFAULT_CONVENTION
) -> float:
    """Max passage time to v over starts u on L_0 with |psi(u)| <= w,
    computed in one sweep rather than per start."""
    _check_convention(c)
    if psi_halfwidth < 0:
        raise ValueError("psi_halfwidth must be nonnegative")
    v = (int(v[0]), int(v[1]))
    if phi(v) < 0:
        raise ValueError("endpoint must lie on or above the line L_0")
    A = int(math.floor(psi_halfwidth / 2.0))  # admissible starts (a, -a), |a| <= A
    a_lo = max(-v[1], -A)
    a_hi = min(v[0], A)
    if a_lo > a_hi:
        raise ValueError("interval contains no start below the endpoint")
    if phi(v) == 0:
        return _degenerate_value(f, v, c)
    prev = np.empty(0)
    up_last = -np.inf
    for idx, i in enumerate(range(a_lo, v[0] + 1)):
        is_source = i <= A  # row's left edge is a line cell (i, -i)
        j0 = -i if is_source else -A
        wrow = f.row(i, j0, v[1] + 1)
        out = np.empty(v[1] - j0 + 1)
        if idx > 0 and i == v[0]:
            up_last = prev[-1]
        if idx == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        elif is_source:
            # fresh source at the left edge; prev starts at column j0 + 1
            out[0] = _init_val(wrow[0], c)
            _dp_row(wrow[1:], prev, out[1:], out[0])
        else:
            _dp_row(wrow, prev, out, -np.inf)
        prev = out
    if c == "exclude_final":
        left = prev[-2] if len(prev) > 1 else -np.inf
        return float(max(up_last, left))
    return float(prev[-1])


def constrained_passage(
    f: WeightField, u, v, corridor_halfwidth: float, c: str = DEFAULT_CONVENTION
) -> float:
    """Passage time over paths confined to |psi - psi_line(phi)| <=
    halfwidth, where psi_line interpolates psi(u) to psi(v) linearly in phi.

    Never exceeds the unconstrained passage time on the same field; raises
    if the corridor admits no monotone path.
    """
    _check_convention(c)
    if not corridor_halfwidth > 0:
        raise ValueError("corridor halfwidth must be positive")
    u = (int(u[0]), int(u[1]))
    v = (int(v[0]), int(v[1]))
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise ValueError(f"endpoints not ordered: {u} !<= {v}")
    h, wd = v[0] - u[0] + 1, v[1] - u[1] + 1
    if h == 1 and wd == 1:
        return _degenerate_value(f, u, c)
    phi_u, phi_v = phi(u), phi(v)
    psi_u, psi_v = psi(u), psi(v)
    slope = (psi_v - psi_u) / (phi_v - phi_u)
    jj = np.arange(u[1], v[1] + 1)
    prev = np.empty(0)
    up_last = -np.inf
    for idx in range(h):
        i = u[0] + idx
        wrow = np.array(f.row(i, u[1], v[1] + 1), copy=True)
        line = psi_u + slope * ((i + jj) - phi_u)
        wrow[np.abs((i - jj) - line) > corridor_halfwidth] = -np.inf
        out = np.empty(wd)
        if idx == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        else:
            if idx == h - 1:
                up_last = prev[-1]
            _dp_row(wrow, prev, out, -np.inf)
        prev = out
    if c == "exclude_final":
        val = max(up_last, prev[-2] if wd > 1 else -np.inf)
    else:
        val = prev[-1]
    if not np.isfinite(val):
        raise ValueError("corridor admits no monotone path between the endpoints")
    return float(val)


# ---------------------------------------------------------------------------
# Trajectory sweeps: one pass over one field, every scale recorded — the
# couplings across scales are exactly those of the shared weights.


def diagonal_passage_profile(
    f: WeightField, n: int, c: str = DEFAULT_CONVENTION
) -> np.ndarray:
    """T_m = passage (0,0) -> (m,m) for m = 0..n, from a single sweep.

    Full-plane fields sweep the square; half-space fields sweep the
    triangle weakly above the diagonal (equivalent by reflection).
    """
    _check_convention(c)
    if n < 0:
        raise ValueError("n must be nonnegative")
    T = np.empty(n + 1)
    prev = np.empty(0)
    if f.half_space:
        for i in range(n + 1):
            wrow = f.upper_row(i, i, n + 1)
            out = np.empty(n + 1 - i)
            if i == 0:
                out[0] = _init_val(wrow[0], c)
                _dp_first_row(wrow, out)
                T[0] = 0.0 if c == "exclude_final" else out[0]
            else:
                # (i, i) has no in-region left predecessor; its only
                # predecessor (i-1, i) sits at offset 1 of the previous row
                T_excl = prev[1]
                _dp_row(wrow, prev[1:], out, -np.inf)
                T[i] = T_excl if c == "exclude_final" else out[0]
            prev = out
    else:
        for i in range(n + 1):
            wrow = f.row(i, 0, n + 1)
            out = np.empty(n + 1)
            if i == 0:
                out[0] = _init_val(wrow[0], c)
                _dp_first_row(wrow, out)
                T[0] = 0.0 if c == "exclude_final" else out[0]
            else:
                _dp_row(wrow, prev, out, -np.inf)
                if c == "exclude_final":
                    up, left = prev[i], out[i - 1]
                    T[i] = up if up >= left else left
                else:
                    T[i] = out[i]
            prev = out
    return T


def p2l_passage_profile(
    f: WeightField, n: int, c: str = DEFAULT_CONVENTION
) -> np.ndarray:
    """T^{p2l}_m = max passage (0,0) -> L_{2m} for m = 0..n, one sweep."""
    _check_convention(c)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if f.half_space:
        raise ValueError("line-passage profiles are defined on full-plane fields")
    R = 2 * n
    linemax = np.full(R + 1, -np.inf)
    prev = np.empty(0)
    for i in range(R + 1):
        width = R - i + 1
        wrow = f.row(i, 0, width)
        out = np.empty(width)
        if i == 0:
            out[0] = _init_val(wrow[0], c)
            _dp_first_row(wrow, out)
        else:
            _dp_row(wrow, prev[:width], out, -np.inf)
        if c == "exclude_final":
            vals = np.empty(width)
            vals[0] = 0.0 if i == 0 else prev[0]
            if width > 1:
                up = prev[1:width] if i > 0 else np.full(width - 1, -np.inf)
                vals[1:] = np.maximum(up, out[: width - 1])
            seg = vals
        else:
            seg = out
        np.maximum(linemax[i : i + width], seg, out=linemax[i : i + width])
        prev = out
    return linemax[0 : R + 1 : 2].copy()


def l2p_passage_profile(
    f: WeightField, n: int, c: str = DEFAULT_CONVENTION
) -> np.ndarray:
    """T^{l2p}_m = max passage L_0 -> (m,m) for m = 0..n, one sweep."""
    _check_convention(c)
    if n < 0:
        raise ValueError("n must be nonnegative")
    if f.half_space:
        raise ValueError("line-passage profiles are defined on full-plane fields")
    T = np.empty(n + 1)
    prev = np.empty(0)
    for idx, i in enumerate(range(-n, n + 1)):
        j0 = -i
        width = n - j0 + 1
        wrow = f.row(i, j0, n + 1)
        out = np.empty(width)
        out[0] = _init_val(wrow[0], c)  # every row starts at a line source
        if width > 1:
            _dp_row(wrow[1:], prev, out[1:], out[0])
        if i >= 0:
            pos = 2 * i  # buffer position of the diagonal cell (i, i)
            if c == "exclude_final":
                if i == 0:
                    T[0] = 0.0
                else:
                    up = prev[pos - 1]  # (i-1, i) in the previous row
                    left = out[pos - 1]
                    T[i] = up if up >= left else left
            else:
                T[i] = out[pos]
        prev = out
    return T


def running_min_statistic(f: WeightField, n: int, c: str = DEFAULT_CONVENTION) -> float:
    """min over 1 <= m <= n of (T_m - 4m) along the diagonal."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prof = diagonal_passage_profile(f, n, c)
    m = np.arange(1, n + 1, dtype=float)
    return float(np.min(prof[1:] - 4.0 * m))


# ---------------------------------------------------------------------------
# Law-of-iterated-logarithm normalizers.


def g_plus(n: int) -> float:
    """2^(4/3) n^(1/3) (log log n)^(2/3), the upper-deviation normalizer."""
    return 2.0 ** (4.0 / 3.0) * n ** (1.0 / 3.0) * math.log(math.log(n)) ** (2.0 / 3.0)


def g_minus(n: int) -> float:
    """2^(4/3) n^(1/3) (log log n)^(1/3), the lower-deviation normalizer."""
    return 2.0 ** (4.0 / 3.0) * n ** (1.0 / 3.0) * math.log(math.log(n)) ** (1.0 / 3.0)


def lil_normalize(T: float, n: int, sign: str) -> float:
    """(T - 4n) / g_plus(n) for 'plus', (T - 4n) / g_minus(n) for 'minus'."""
    if n < 16:
        raise ValueError(f"n must be >= 16 for the iterated-logarithm normalizer, got {n}")
    if sign == "plus":
        return (T - 4.0 * n) / g_plus(n)
    if sign == "minus":
        return (T - 4.0 * n) / g_minus(n)
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")
