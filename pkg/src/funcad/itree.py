"""Isolation-tree machinery shared by the multivariate and functional forests.

A tree only sees a projection matrix: ``proj[i, f]`` is the value of sample
``i`` along split direction ``f`` (a coordinate for Isolation Forest, a
dictionary atom for the functional variant). Trees are stored as flat arrays
in preorder so they serialize without recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EULER_GAMMA = 0.5772156649015329


def average_path_length(n) -> np.ndarray | float:
    """Expected path length of an unsuccessful BST search among ``n`` points.

    ``c(n) = 2 (ln(n - 1) + gamma) - 2 (n - 1) / n`` for n > 2, with c(2) = 1
    and c(n) = 0 for n <= 1.
    """
    n_arr = np.asarray(n, dtype=float)
    out = np.zeros_like(n_arr)
    out = np.where(n_arr == 2, 1.0, out)
    big = n_arr > 2
    safe = np.where(big, n_arr, 3.0)
    out = np.where(big, 2.0 * (np.log(safe - 1.0) + EULER_GAMMA) - 2.0 * (safe - 1.0) / safe, out)
    return float(out) if np.ndim(n) == 0 else out


def default_height_limit(psi: int) -> int:
    return max(1, math.ceil(math.log2(psi))) if psi > 1 else 1


@dataclass(eq=False)
class IsolationTree:
    feature: np.ndarray    # split direction per node, -1 for leaves
    threshold: np.ndarray  # go left when projection < threshold
    left: np.ndarray
    right: np.ndarray
    size: np.ndarray       # training points reaching the node
    depth: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def to_dict(self) -> dict:
        d = {k: getattr(self, k).tolist() for k in ("feature", "left", "right", "size", "depth")}
        d["threshold"] = [None if np.isnan(v) else float(v) for v in self.threshold]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> IsolationTree:
        ints = {k: np.asarray(d[k], dtype=np.int64) for k in ("feature", "left", "right", "size", "depth")}
        thr = np.array([np.nan if v is None else v for v in d["threshold"]], dtype=float)
        return cls(threshold=thr, **ints)

    def path_lengths(self, proj: np.ndarray) -> np.ndarray:
        """Depth of the reached leaf plus c(leaf size), for each row of ``proj``."""
        node = np.zeros(proj.shape[0], dtype=np.int64)
        rows = np.arange(proj.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = proj[r, self.feature[nd]] < self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return self.depth[node] + average_path_length(self.size[node])


def grow_tree(proj, rng: np.random.Generator, height_limit: int,
              max_tries: int = 1, n_rows: int | None = None) -> IsolationTree:
    """Random isolation tree on the rows of ``proj`` (n x n_directions).

    At each node a direction is drawn uniformly; if the node's projections on
    it are constant (no float fits strictly between their min and max)
    another one is drawn, up to ``max_tries`` times, after
    which the node becomes a leaf. Thresholds are uniform on (min, max).
    Nodes are created (and random numbers consumed) in preorder.

    ``proj`` may instead be a callable ``pick(idx, rng) -> (direction, values)``
    that draws a direction and returns the projections of rows ``idx`` on it;
    ``n_rows`` then gives the number of rows.
    """
    if callable(proj):
        pick = proj
        n = int(n_rows)
    else:
        proj = np.asarray(proj, dtype=float)
        n = proj.shape[0]

        def pick(idx, rng):
            f = int(rng.integers(proj.shape[1]))
            return f, proj[idx, f]

    nodes: list[list] = []  # [feature, threshold, left, right, size, depth]

    def build(idx: np.ndarray, d: int) -> int:
        node = len(nodes)
        nodes.append([-1, np.nan, -1, -1, idx.size, d])
        if idx.size <= 1 or d >= height_limit:
            return node
        for _ in range(max_tries):
            f, vals = pick(idx, rng)
            lo, hi = vals.min(), vals.max()
            # a split needs a float strictly between min and max
            if np.nextafter(lo, np.inf) < hi:
                break
        else:
            return node
        thr = lo + rng.random() * (hi - lo)
        while not lo < thr < hi:
            thr = lo + rng.random() * (hi - lo)
        mask = vals < thr
        nodes[node][0], nodes[node][1] = f, thr
        nodes[node][2] = build(idx[mask], d + 1)
        nodes[node][3] = build(idx[~mask], d + 1)
        return node

    build(np.arange(n), 0)
    cols = list(zip(*nodes))
    return IsolationTree(np.asarray(cols[0], dtype=np.int64), np.asarray(cols[1], dtype=float),
                         np.asarray(cols[2], dtype=np.int64), np.asarray(cols[3], dtype=np.int64),
                         np.asarray(cols[4], dtype=np.int64), np.asarray(cols[5], dtype=np.int64))
