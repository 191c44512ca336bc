"""Synthetic normal curves and the four additive contamination models.

Anomalies are built by adding an independent curve ``Y`` to a randomly chosen
fraction of normal curves:

* ``isolated``    ``Y(t) = eps * u * 1{t = tau}``, u ~ U[3, 4], eps = +-1, tau a grid point
* ``magnitude1``  ``Y(t) = u``, u ~ U[-15, -12]
* ``magnitude2``  ``Y(t) = u * 1{t in I}``, u ~ U[0, 15], I of length 1/10 at a uniform location
* ``shape``       ``Y(t) = sin(2 pi u t)``, u ~ U[0.2, 2]
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core import (ANOMALY, NORMAL, ContractError, FunctionalDataset, Grid,
                   load_csv, load_labels, write_csv, write_vector)

MODELS = ("isolated", "magnitude1", "magnitude2", "shape")
WINDOW = 0.1


@dataclass(frozen=True)
class ContaminationSpec:
    model: str
    fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ContractError(f"unknown contamination model {self.model!r}; expected one of {MODELS}")
        if not 0.0 < self.fraction < 1.0:
            raise ContractError(f"fraction must lie in (0, 1), got {self.fraction}")

    def n_anomalies(self, n: int) -> int:
        # round half up: 0.05 * 1794 = 89.7 -> 90
        k = int(np.floor(self.fraction * n + 0.5))
        if k < 1:
            raise ContractError(f"fraction {self.fraction} selects no curve out of n = {n}")
        return k


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    dataset: FunctionalDataset
    labels: np.ndarray
    provenance: list = field(default_factory=list)

    def save(self, stem) -> list[Path]:
        """Write ``<stem>_curves.csv``, ``<stem>_labels.csv`` and ``<stem>_provenance.json``."""
        stem = Path(stem)
        paths = [Path(f"{stem}_curves.csv"), Path(f"{stem}_labels.csv"), Path(f"{stem}_provenance.json")]
        write_csv(self.dataset, paths[0], header=True)
        write_vector(np.asarray(self.labels, dtype=np.int64), paths[1])
        with open(paths[2], "w", encoding="utf-8") as fh:
            json.dump({"anomalies": self.provenance}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return paths

    @classmethod
    def load(cls, stem) -> LabeledDataset:
        stem = Path(stem)
        ds = load_csv(Path(f"{stem}_curves.csv"), grid_mode="header-row")
        labels = load_labels(Path(f"{stem}_labels.csv"), ds.n)
        prov_path = Path(f"{stem}_provenance.json")
        provenance = json.loads(prov_path.read_text())["anomalies"] if prov_path.exists() else []
        return cls(ds, labels, provenance)


# --- normal curves ------------------------------------------------------------

def gen_normal_base(n: int, grid: Grid, kind: str = "smooth-random", seed: int = 0,
                    n_atoms: int = 12, ar_coef: float = 0.5, scale: float = 1.0,
                    amp_spread: float = 0.0, first_atom: int = 0) -> FunctionalDataset:
    """Seeded normal curves.

    ``smooth-random``: ``sum_k z_k / (1 + k) * cos(pi k t)`` over the ``n_atoms``
    frequencies ``k >= first_atom``, z_k ~ N(0, 1).
    ``ar-noise``: stationary AR(1) path with coefficient ``ar_coef`` and unit marginal variance.
    Each curve is multiplied by ``scale * exp(amp_spread * g)``, g ~ N(0, 1), so
    ``amp_spread > 0`` gives curves of unequal amplitude.
    """
    if n < 1:
        raise ContractError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    t = grid.points
    if kind == "smooth-random":
        k = np.arange(first_atom, first_atom + n_atoms)
        atoms = np.cos(np.pi * k[:, None] * t[None, :])
        coefs = rng.standard_normal((n, n_atoms)) / (1.0 + k)
        values = coefs @ atoms
    elif kind == "ar-noise":
        if not -1.0 < ar_coef < 1.0:
            raise ContractError(f"ar_coef must lie in (-1, 1), got {ar_coef}")
        innov = rng.standard_normal((n, t.size)) * np.sqrt(1.0 - ar_coef**2)
        values = np.empty((n, t.size))
        values[:, 0] = rng.standard_normal(n)
        for k in range(1, t.size):
            values[:, k] = ar_coef * values[:, k - 1] + innov[:, k]
    else:
        raise ContractError(f"unknown normal base kind {kind!r}")
    if amp_spread:
        values = values * np.exp(amp_spread * rng.standard_normal(n))[:, None]
    return FunctionalDataset(grid, scale * values)


# --- anomalies ---------------------------------------------------------------------

def window_mask(grid: Grid, start: float, length: float = WINDOW) -> np.ndarray:
    """Grid points in ``[start, start + length)``."""
    t = grid.points
    return (t >= start) & (t < start + length)


def draw_params(model: str, grid: Grid, rng: np.random.Generator) -> dict:
    if model == "isolated":
        return {"model": model, "u": float(rng.uniform(3.0, 4.0)),
                "sign": int(rng.choice([-1, 1])), "index": int(rng.integers(len(grid)))}
    if model == "magnitude1":
        return {"model": model, "u": float(rng.uniform(-15.0, -12.0))}
    if model == "magnitude2":
        return {"model": model, "u": float(rng.uniform(0.0, 15.0)),
                "start": float(rng.uniform(0.0, 1.0 - WINDOW))}
    if model == "shape":
        return {"model": model, "u": float(rng.uniform(0.2, 2.0))}
    raise ContractError(f"unknown contamination model {model!r}")


def anomaly_curve(params: dict, grid: Grid) -> np.ndarray:
    """Rebuild ``Y`` on the grid from recorded parameters."""
    t = grid.points
    model = params["model"]
    if model == "isolated":
        y = np.zeros_like(t)
        y[params["index"]] = params["sign"] * params["u"]
        return y
    if model == "magnitude1":
        return np.full_like(t, params["u"])
    if model == "magnitude2":
        return np.where(window_mask(grid, params["start"]), params["u"], 0.0)
    if model == "shape":
        return np.sin(2.0 * np.pi * params["u"] * t)
    raise ContractError(f"unknown contamination model {model!r}")


def draw_anomaly(model: str, grid: Grid, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    params = draw_params(model, grid, rng)
    return anomaly_curve(params, grid), params


def contaminate(dataset: FunctionalDataset, spec: ContaminationSpec) -> LabeledDataset:
    """Add an independent anomaly curve to ``round(fraction * n)`` distinct rows."""
    k = spec.n_anomalies(dataset.n)
    rng = np.random.default_rng(spec.seed)
    rows = np.sort(rng.choice(dataset.n, size=k, replace=False))
    values = dataset.values.copy()
    labels = np.full(dataset.n, NORMAL, dtype=int)
    provenance = []
    for r in rows:
        y, params = draw_anomaly(spec.model, dataset.grid, rng)
        values[r] = values[r] + y
        labels[r] = ANOMALY
        provenance.append({"row": int(r), **params})
    return LabeledDataset(dataset.with_values(values), labels, provenance)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to rebuild one labeled synthetic dataset."""

    model: str
    fraction: float = 0.05
    n: int = 400
    p: int = 512
    seed: int = 0
    # high-frequency band of cosines, unequal amplitudes: see README "Simulation"
    base: str = "smooth-random"
    scale: float = 6.5
    amp_spread: float = 0.3
    ar_coef: float = 0.5
    first_atom: int = 16

    def build(self) -> LabeledDataset:
        grid = Grid.uniform(self.p)
        # independent streams for the normal base and the contamination
        base_seed, cont_seed = np.random.SeedSequence(self.seed).generate_state(2)
        normal = gen_normal_base(self.n, grid, self.base, int(base_seed), scale=self.scale,
                                 amp_spread=self.amp_spread, ar_coef=self.ar_coef,
                                 first_atom=self.first_atom)
        return contaminate(normal, ContaminationSpec(self.model, self.fraction, int(cont_seed)))

    def to_dict(self) -> dict:
        return asdict(self)
