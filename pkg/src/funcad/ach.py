"""Area-of-the-convex-hull (ACH) functional depth.

The depth of a curve is the average, over J-subsets of the sample, of

    area(hull(graphs of the subset)) / area(hull(graphs of the subset + curve))

All curves share one grid, so the hull of a union of graphs is bounded above
by the upper hull of the pointwise maximum and below by the lower hull of the
pointwise minimum. Each hull is kept as two vertex chains sorted by time; the
hull of a union is obtained by merging chains, which keeps the per-pair cost
proportional to the number of hull vertices rather than to the grid size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numba
import numpy as np

from .core import ContractError, DimensionError, FunctionalDataset


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Vertices of the planar convex hull in counter-clockwise order (monotone chain)."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ContractError("convex hull of an empty point set")
    uniq = sorted(set(map(tuple, pts)))
    if len(uniq) <= 2:
        return np.array(uniq)
    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def polygon_area(vertices) -> float:
    """Shoelace area of a simple polygon given in order."""
    v = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if v.shape[0] < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def convex_hull_area(points) -> float:
    return polygon_area(convex_hull(points))


def graph_points(values, grid_points) -> np.ndarray:
    """All (t, x(t)) pairs of one or more curves."""
    values = np.atleast_2d(values)
    t = np.broadcast_to(grid_points, values.shape)
    return np.column_stack([t.ravel(), values.ravel()])


# --- chain kernels ------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _chain(t, y, upper, out_t, out_y):
    """Upper (or lower) hull of points with strictly increasing t; returns vertex count."""
    m = 0
    sign = 1.0 if upper else -1.0
    for i in range(t.size):
        while m >= 2:
            cr = (out_t[m - 1] - out_t[m - 2]) * (y[i] - out_y[m - 2]) - \
                 (out_y[m - 1] - out_y[m - 2]) * (t[i] - out_t[m - 2])
            if sign * cr >= 0.0:
                m -= 1
            else:
                break
        out_t[m] = t[i]
        out_y[m] = y[i]
        m += 1
    return m


@numba.njit(cache=True, nogil=True)
def _chain_integral(t, y, m):
    s = 0.0
    for i in range(m - 1):
        s += 0.5 * (y[i] + y[i + 1]) * (t[i + 1] - t[i])
    return s


@numba.njit(cache=True, nogil=True)
def _merge(at, ay, an, bt, by, bn, upper, mt, my):
    """Merge two t-sorted vertex lists, keeping the extreme y on equal t."""
    i = 0
    j = 0
    m = 0
    while i < an or j < bn:
        if j >= bn or (i < an and at[i] < bt[j]):
            tt = at[i]
            yy = ay[i]
            i += 1
        elif i >= an or bt[j] < at[i]:
            tt = bt[j]
            yy = by[j]
            j += 1
        else:
            tt = at[i]
            if upper:
                yy = max(ay[i], by[j])
            else:
                yy = min(ay[i], by[j])
            i += 1
            j += 1
        mt[m] = tt
        my[m] = yy
        m += 1
    return m


@numba.njit(cache=True, nogil=True)
def _chains_csr(t, values, upper):
    """Hull chains of each row of ``values``, packed as (t, y, offsets)."""
    n, p = values.shape
    ct = np.empty(n * p)
    cy = np.empty(n * p)
    ptr = np.zeros(n + 1, dtype=np.int64)
    bt = np.empty(p)
    by = np.empty(p)
    for r in range(n):
        m = _chain(t, values[r], upper, bt, by)
        start = ptr[r]
        for k in range(m):
            ct[start + k] = bt[k]
            cy[start + k] = by[k]
        ptr[r + 1] = start + m
    return ct[: ptr[n]].copy(), cy[: ptr[n]].copy(), ptr


@numba.njit(cache=True, nogil=True)
def _union_area(ut1, uy1, un1, lt1, ly1, ln1, ut2, uy2, un2, lt2, ly2, ln2, wt, wy, ht, hy):
    m = _merge(ut1, uy1, un1, ut2, uy2, un2, True, wt, wy)
    h = _chain(wt[:m], wy[:m], True, ht, hy)
    top = _chain_integral(ht, hy, h)
    m = _merge(lt1, ly1, ln1, lt2, ly2, ln2, False, wt, wy)
    h = _chain(wt[:m], wy[:m], False, ht, hy)
    bottom = _chain_integral(ht, hy, h)
    return top - bottom


@numba.njit(cache=True, nogil=True)
def _ratio_sums(s_ut, s_uy, s_up, s_lt, s_ly, s_lp, s_area, members,
                q_ut, q_uy, q_up, q_lt, q_ly, q_lp, exclude, out_sum, out_cnt):
    nq = q_up.size - 1
    ns = s_up.size - 1
    cap = 0
    for s in range(ns):
        cap = max(cap, s_up[s + 1] - s_up[s], s_lp[s + 1] - s_lp[s])
    qcap = 0
    for q in range(nq):
        qcap = max(qcap, q_up[q + 1] - q_up[q], q_lp[q + 1] - q_lp[q])
    wt = np.empty(cap + qcap)
    wy = np.empty(cap + qcap)
    ht = np.empty(cap + qcap)
    hy = np.empty(cap + qcap)
    J = members.shape[1]
    for q in range(nq):
        total = 0.0
        count = 0
        for s in range(ns):
            if exclude[q] >= 0:
                skip = False
                for k in range(J):
                    if members[s, k] == exclude[q]:
                        skip = True
                        break
                if skip:
                    continue
            den = _union_area(
                s_ut[s_up[s]:s_up[s + 1]], s_uy[s_up[s]:s_up[s + 1]], s_up[s + 1] - s_up[s],
                s_lt[s_lp[s]:s_lp[s + 1]], s_ly[s_lp[s]:s_lp[s + 1]], s_lp[s + 1] - s_lp[s],
                q_ut[q_up[q]:q_up[q + 1]], q_uy[q_up[q]:q_up[q + 1]], q_up[q + 1] - q_up[q],
                q_lt[q_lp[q]:q_lp[q + 1]], q_ly[q_lp[q]:q_lp[q + 1]], q_lp[q + 1] - q_lp[q],
                wt, wy, ht, hy)
            num = s_area[s]
            if den <= 0.0:
                r = 1.0
            else:
                r = min(num / den, 1.0)
            total += r
            count += 1
        out_sum[q] = total
        out_cnt[q] = count


# --- public API -------------------------------------------------------------------

@dataclass(frozen=True)
class AchConfig:
    J: int = 2
    n_subsets: int | None = None  # None -> 32 * n
    seed: int = 0
    exact_limit: int = 10_000  # enumerate all subsets when C(n, J) is at most this
    n_jobs: int = 1

    def __post_init__(self):
        if self.J < 1:
            raise ContractError(f"J must be >= 1, got {self.J}")
        if self.n_subsets is not None and self.n_subsets < 1:
            raise ContractError(f"n_subsets must be >= 1, got {self.n_subsets}")


def draw_subsets(n: int, cfg: AchConfig) -> np.ndarray:
    """Subset index matrix (rows sorted): all C(n, J) subsets if few, else seeded draws."""
    if cfg.J > n:
        raise ContractError(f"J = {cfg.J} exceeds sample size {n}")
    if math.comb(n, cfg.J) <= cfg.exact_limit:
        return np.array(list(combinations(range(n), cfg.J)), dtype=np.int64).reshape(-1, cfg.J)
    m = cfg.n_subsets if cfg.n_subsets is not None else 32 * n
    rng = np.random.default_rng(cfg.seed)
    out = np.empty((m, cfg.J), dtype=np.int64)
    for s in range(m):
        out[s] = np.sort(rng.choice(n, size=cfg.J, replace=False))
    return out


class _Chains:
    """Upper chains of ``top`` rows and lower chains of ``bottom`` rows, with hull areas."""

    def __init__(self, t, top, bottom=None):
        top = np.ascontiguousarray(top, dtype=float)
        bottom = top if bottom is None else np.ascontiguousarray(bottom, dtype=float)
        self.ut, self.uy, self.up = _chains_csr(t, top, True)
        self.lt, self.ly, self.lp = _chains_csr(t, bottom, False)
        self.area = np.array([
            _chain_integral(self.ut[a:b], self.uy[a:b], b - a) - _chain_integral(self.lt[c:d], self.ly[c:d], d - c)
            for a, b, c, d in zip(self.up[:-1], self.up[1:], self.lp[:-1], self.lp[1:])
        ])

    def slice(self, lo: int, hi: int) -> _Chains:
        out = object.__new__(_Chains)
        a, b = self.up[lo], self.up[hi]
        c, d = self.lp[lo], self.lp[hi]
        out.ut, out.uy, out.up = self.ut[a:b], self.uy[a:b], self.up[lo:hi + 1] - a
        out.lt, out.ly, out.lp = self.lt[c:d], self.ly[c:d], self.lp[lo:hi + 1] - c
        out.area = self.area[lo:hi]
        return out


def _subset_envelopes(values: np.ndarray, subsets: np.ndarray):
    top = values[subsets[:, 0]].copy()
    bottom = top.copy()
    for k in range(1, subsets.shape[1]):
        np.maximum(top, values[subsets[:, k]], out=top)
        np.minimum(bottom, values[subsets[:, k]], out=bottom)
    return top, bottom


class AchModel:
    """Precomputed subset hulls of a sample, ready to score query curves."""

    def __init__(self, dataset: FunctionalDataset, cfg: AchConfig = AchConfig()):
        self.dataset = dataset
        self.cfg = cfg
        self.subsets = draw_subsets(dataset.n, cfg)
        t = dataset.grid.points
        self._sub = _Chains(t, *_subset_envelopes(dataset.values, self.subsets))

    def depths(self, queries, exclude=None) -> np.ndarray:
        """ACH depth of each row of ``queries``.

        ``exclude[i] = k`` drops subsets that contain sample curve ``k`` when
        scoring query ``i`` (used when the query is itself a sample member).
        """
        q = np.atleast_2d(np.asarray(queries, dtype=float))
        if q.shape[1] != self.dataset.p:
            raise DimensionError(f"curve length {q.shape[1]} does not match grid length {self.dataset.p}")
        ex = np.full(q.shape[0], -1, dtype=np.int64) if exclude is None else np.asarray(exclude, dtype=np.int64)
        chains = _Chains(self.dataset.grid.points, q)
        sums = np.zeros(q.shape[0])
        counts = np.zeros(q.shape[0], dtype=np.int64)

        def work(lo, hi):
            c = chains.slice(lo, hi)
            s = self._sub
            _ratio_sums(s.ut, s.uy, s.up, s.lt, s.ly, s.lp, s.area, self.subsets,
                        c.ut, c.uy, c.up, c.lt, c.ly, c.lp, ex[lo:hi], sums[lo:hi], counts[lo:hi])

        bounds = np.linspace(0, q.shape[0], max(1, min(self.cfg.n_jobs, q.shape[0])) + 1).astype(int)
        if len(bounds) > 2:
            with ThreadPoolExecutor(len(bounds) - 1) as pool:
                list(pool.map(lambda ab: work(*ab), zip(bounds[:-1], bounds[1:])))
        else:
            work(0, q.shape[0])

        # a member contained in every subset (e.g. J = n) falls back to all subsets
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            ex2 = np.full(empty.size, -1, dtype=np.int64)
            c = _Chains(self.dataset.grid.points, q[empty])
            s2 = np.zeros(empty.size)
            c2 = np.zeros(empty.size, dtype=np.int64)
            s = self._sub
            _ratio_sums(s.ut, s.uy, s.up, s.lt, s.ly, s.lp, s.area, self.subsets,
                        c.ut, c.uy, c.up, c.lt, c.ly, c.lp, ex2, s2, c2)
            sums[empty], counts[empty] = s2, c2
        return sums / counts


def ach_depth(curve, dataset: FunctionalDataset, cfg: AchConfig = AchConfig()) -> float:
    curve = np.asarray(curve, dtype=float)
    if curve.ndim != 1:
        raise DimensionError("curve must be one-dimensional")
    return float(AchModel(dataset, cfg).depths(curve[None, :])[0])


def ach_depths(dataset: FunctionalDataset, cfg: AchConfig = AchConfig(), queries=None) -> np.ndarray:
    """ACH depths of ``queries`` (default: the sample itself, each member left out of its own subsets)."""
    model = AchModel(dataset, cfg)
    if queries is None:
        return model.depths(dataset.values, exclude=np.arange(dataset.n))
    if isinstance(queries, FunctionalDataset):
        dataset.check_grid(queries)
        queries = queries.values
    return model.depths(queries)
