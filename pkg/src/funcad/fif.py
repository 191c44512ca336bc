"""Functional Isolation Forest.

Every tree draws its own dictionary of atoms (for the stochastic kinds) and
grows an isolation tree in which each node splits along the projection of the
curves onto one atom, chosen uniformly among the tree's atoms. Projections use
a convex mix of the L2 cosine of the curves and the L2 cosine of their first
derivatives, weighted by ``alpha``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import ContractError, DimensionError, FunctionalDataset, Grid, derivative_values
from .itree import IsolationTree, average_path_length, default_height_limit, grow_tree

KINDS = ("brownian", "cosine", "self", "custom")
EPS = 1e-12


def sobolev_inner(x, d, alpha: float, grid: Grid | None = None) -> float:
    """``alpha * cos(x, d) + (1 - alpha) * cos(x', d')`` under the L2 inner product.

    Zero norms are replaced by a tiny epsilon so the corresponding cosine is 0.
    """
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    if x.shape != d.shape or x.ndim != 1:
        raise DimensionError("x and d must be curves of equal length")
    grid = Grid.uniform(x.size) if grid is None else grid
    ux, dx = _unit_pair(x[None, :], grid)
    ud, dd = _unit_pair(d[None, :], grid)
    w = grid.trapezoid_weights()
    return float(alpha * np.sum(ux * ud * w) + (1.0 - alpha) * np.sum(dx * dd * w))


def _unit_pair(values: np.ndarray, grid: Grid) -> tuple[np.ndarray, np.ndarray]:
    """Curves and their derivatives, each scaled to unit L2 norm (zero stays zero)."""
    w = grid.trapezoid_weights()
    deriv = derivative_values(values, grid)
    nv = np.sqrt(np.sum(values**2 * w, axis=1))
    nd = np.sqrt(np.sum(deriv**2 * w, axis=1))
    return values / np.maximum(nv, EPS)[:, None], deriv / np.maximum(nd, EPS)[:, None]


class _Projector:
    """Projections of a fixed set of curves on dictionary atoms.

    Duplicate curves are projected once and share the result: BLAS may round
    identical rows differently, which would let a split separate copies of
    one curve.
    """

    def __init__(self, values: np.ndarray, grid: Grid):
        ux, dx = _unit_pair(values, grid)
        first: dict[bytes, int] = {}
        inv = np.array([first.setdefault(a.tobytes() + b.tobytes(), i) for i, (a, b) in enumerate(zip(ux, dx))])
        rows = np.unique(inv)
        self.inverse = np.searchsorted(rows, inv)
        w = grid.trapezoid_weights()
        self.uw, self.dw = ux[rows] * w, dx[rows] * w
        self.grid = grid

    def __call__(self, atoms: np.ndarray, alpha: float, subset=None) -> np.ndarray:
        """``alpha <ux_i, ua_j> + (1 - alpha) <dx_i, da_j>`` for curves i (of ``subset``) and atoms j."""
        ua, da = _unit_pair(np.atleast_2d(atoms), self.grid)
        pos = self.inverse if subset is None else self.inverse[subset]
        need = np.unique(pos)
        out = alpha * self.uw[need] @ ua.T + (1.0 - alpha) * self.dw[need] @ da.T
        return out[np.searchsorted(need, pos)]


@dataclass(frozen=True)
class FifConfig:
    n_trees: int = 100
    subsample: int | None = None       # None -> min(256, n)
    alpha: float = 0.5
    height_limit: int | None = None    # None -> ceil(log2(subsample))
    seed: int = 0
    dictionary: str = "brownian"
    atoms_per_tree: int | None = 16    # brownian pool per tree; None draws a fresh atom at every node
    n_jobs: int = 1

    def __post_init__(self):
        if self.n_trees < 1:
            raise ContractError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.subsample is not None and self.subsample < 2:
            raise ContractError(f"subsample must be >= 2, got {self.subsample}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ContractError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.height_limit is not None and self.height_limit < 1:
            raise ContractError(f"height_limit must be >= 1, got {self.height_limit}")
        if self.dictionary not in KINDS:
            raise ContractError(f"unknown dictionary kind {self.dictionary!r}")
        if self.atoms_per_tree is not None and self.atoms_per_tree < 1:
            raise ContractError("atoms_per_tree must be >= 1 or None")
        if self.atoms_per_tree is None and self.dictionary == "cosine":
            raise ContractError("the cosine dictionary needs a fixed atoms_per_tree")


def brownian_atoms(grid: Grid, m: int, rng: np.random.Generator) -> np.ndarray:
    """Standard Brownian paths started at 0, sampled on the grid.

    Paths with a zero norm or a zero derivative norm are redrawn.
    """
    t = grid.points
    dt = np.sqrt(np.diff(t))
    out = np.empty((m, t.size))
    todo = np.arange(m)
    while todo.size:
        steps = rng.standard_normal((todo.size, t.size - 1)) * dt
        out[todo] = np.concatenate([np.zeros((todo.size, 1)), np.cumsum(steps, axis=1)], axis=1)
        w = grid.trapezoid_weights()
        norms = (out[todo] ** 2) @ w
        dnorms = (derivative_values(out[todo], grid) ** 2) @ w
        todo = todo[(norms <= 0) | (dnorms <= 0)]
    return out


def cosine_atoms(grid: Grid, m: int) -> np.ndarray:
    k = np.arange(1, m + 1)
    return np.cos(np.pi * k[:, None] * grid.points[None, :])


@dataclass(eq=False)
class FiTree:
    tree: IsolationTree
    atoms: np.ndarray | None = None      # m x p, by value; None when atoms are shared

    def to_dict(self) -> dict:
        d = {"nodes": self.tree.to_dict()}
        if self.atoms is not None:
            d["atoms"] = self.atoms.tolist()
        return d


@dataclass(eq=False)
class FiForest:
    grid: Grid
    config: FifConfig
    psi: int
    trees: list[FiTree] = field(default_factory=list)
    shared_atoms: np.ndarray | None = None

    def path_lengths(self, curves) -> np.ndarray:
        """n_curves x n_trees matrix of adjusted path lengths."""
        project = _Projector(self._check(curves), self.grid)
        a = self.config.alpha
        shared = None
        if self.shared_atoms is not None:
            shared = project(self.shared_atoms, a)

        def one(t: FiTree) -> np.ndarray:
            if t.atoms is None:
                proj = shared
            else:
                proj = project(t.atoms, a)
            return t.tree.path_lengths(proj)

        return np.column_stack(_map(one, self.trees, self.config.n_jobs))

    def score(self, curves) -> np.ndarray:
        """``2 ** (-mean path length / c(psi))``; higher is more anomalous."""
        h = self.path_lengths(curves).mean(axis=1)
        return score_from_path_length(h, self.psi)

    def _check(self, curves) -> np.ndarray:
        if isinstance(curves, FunctionalDataset):
            if curves.grid != self.grid:
                raise DimensionError("curves are not on the forest grid")
            return curves.values
        q = np.atleast_2d(np.asarray(curves, dtype=float))
        if q.shape[1] != len(self.grid):
            raise DimensionError(f"curve length {q.shape[1]} does not match grid length {len(self.grid)}")
        return q

    def to_dict(self) -> dict:
        return {
            "kind": "fif",
            "grid": self.grid.points.tolist(),
            "config": asdict(self.config),
            "psi": self.psi,
            "shared_atoms": None if self.shared_atoms is None else self.shared_atoms.tolist(),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> FiForest:
        shared = None if d.get("shared_atoms") is None else np.asarray(d["shared_atoms"], dtype=float)
        p = len(d["grid"])
        trees = [FiTree(IsolationTree.from_dict(t["nodes"]),
                        None if "atoms" not in t else np.asarray(t["atoms"], dtype=float).reshape(-1, p))
                 for t in d["trees"]]
        return cls(Grid(d["grid"]), FifConfig(**d["config"]), int(d["psi"]), trees, shared)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def score_from_path_length(h, psi: int) -> np.ndarray:
    c = average_path_length(psi)
    h = np.asarray(h, dtype=float)
    if c == 0:
        # a single-point subsample carries no information
        return np.full(h.shape, 0.5)
    return np.power(2.0, -h / c)


def _map(fn, items, n_jobs: int) -> list:
    if n_jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def fit(dataset: FunctionalDataset, cfg: FifConfig = FifConfig(), atoms=None) -> FiForest:
    """Grow ``cfg.n_trees`` functional isolation trees on random subsamples.

    ``atoms`` supplies the dictionary for ``dictionary="custom"``.
    """
    n = dataset.n
    psi = min(256, n) if cfg.subsample is None else cfg.subsample
    if psi > n:
        raise ContractError(f"subsample {psi} exceeds sample size {n}")
    if psi < 2:
        raise ContractError("functional isolation forest needs at least 2 curves")
    height = default_height_limit(psi) if cfg.height_limit is None else cfg.height_limit
    grid = dataset.grid
    project = _Projector(dataset.values, grid)

    shared = None
    if cfg.dictionary == "self":
        shared = dataset.values.copy()
    elif cfg.dictionary == "cosine":
        shared = cosine_atoms(grid, cfg.atoms_per_tree)
    elif cfg.dictionary == "custom":
        if atoms is None:
            raise ContractError("custom dictionary needs atoms")
        shared = np.atleast_2d(np.asarray(atoms, dtype=float))
        if shared.shape[1] != len(grid):
            raise DimensionError("dictionary atoms are not on the dataset grid")
    shared_proj = None
    if shared is not None:
        shared_proj = project(shared, cfg.alpha)

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.n_trees)

    def grow(ss: np.random.SeedSequence) -> FiTree:
        rng = np.random.default_rng(ss)
        rows = rng.choice(n, size=psi, replace=False)
        if shared_proj is not None:
            return FiTree(grow_tree(shared_proj[rows], rng, height))
        if cfg.atoms_per_tree is None:
            return _grow_per_node(project, rows, grid, cfg.alpha, rng, height)
        tree_atoms = brownian_atoms(grid, cfg.atoms_per_tree, rng)
        proj = project(tree_atoms, cfg.alpha, rows)
        return FiTree(grow_tree(proj, rng, height), tree_atoms)

    trees = _map(grow, seeds, cfg.n_jobs)
    return FiForest(grid, cfg, psi, trees, shared)


def _grow_per_node(project: _Projector, rows, grid: Grid, alpha: float, rng, height: int) -> FiTree:
    """Tree whose every node draws its own Brownian atom; atoms are kept in node order."""
    atoms: list[np.ndarray] = []

    def pick(idx, rng):
        atom = brownian_atoms(grid, 1, rng)
        atoms.append(atom[0])
        return len(atoms) - 1, project(atom, alpha, rows[idx])[:, 0]

    tree = grow_tree(pick, rng, height, n_rows=len(rows))
    tree_atoms = np.asarray(atoms) if atoms else np.zeros((0, len(grid)))
    return FiTree(tree, tree_atoms)


def score(forest: FiForest, curves) -> np.ndarray:
    return forest.score(curves)
