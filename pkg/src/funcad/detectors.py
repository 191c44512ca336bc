"""Named detector pipelines with a common fit / score / persist interface.

Every detector maps curves to anomaly scores where larger means more
anomalous. ``fit_score`` scores the training curves themselves, which is how
the benchmark evaluates unsupervised detectors; ``score`` handles new curves.
"""

from __future__ import annotations

import copy

import numpy as np

from .ach import AchConfig, AchModel, ach_depths
from .baselines import IForest, IForestConfig, LofModel, iforest_fit, lof_fit
from .core import ContractError, FunctionalDataset, Grid
from .featuremaps import FeatureMapModel, featuremap_fit
from .fif import FifConfig, FiForest, fit as fif_fit
from .filtering import FpcaModel, fpca_fit, fpca_transform, haar_projection
from .integrated import IntegratedDepthConfig, depth_to_score, integrated_depths
from .udepth import column_summaries

_IF = {"n_trees": 100, "subsample": None}

# name -> (family, default parameters)
REGISTRY: dict[str, tuple[str, dict]] = {
    "fT": ("depth", {"base": "tukey", "weights": "auto"}),
    "fSDO": ("depth", {"base": "projection", "weights": "auto"}),
    "fAO": ("depth", {"base": "asym_projection", "weights": "auto"}),
    "ACH": ("ach", {"J": 2, "n_subsets": None, "exact_limit": 10_000}),
    "FIF": ("fif", {"n_trees": 100, "subsample": None, "alpha": 0.5, "height_limit": None,
                    "dictionary": "brownian", "atoms_per_tree": 16}),
    "MS+IF": ("featuremap", {"map": "ms", "base": "tukey", **_IF}),
    "FOM(fSDO)+IF": ("featuremap", {"map": "fom", "base": "projection", **_IF}),
    "FOM(fAO)+IF": ("featuremap", {"map": "fom", "base": "asym_projection", **_IF}),
    "FPCA+IF": ("filter", {"filter": "fpca", "k": 10, "learner": "if", **_IF}),
    "FPCA+LOF": ("filter", {"filter": "fpca", "k": 10, "learner": "lof", "lof_k": 20}),
    "HAAR+IF": ("filter", {"filter": "haar", "level": 6, "learner": "if", **_IF}),
    "HAAR+LOF": ("filter", {"filter": "haar", "level": 6, "learner": "lof", "lof_k": 20}),
}


def _dataset_doc(ds: FunctionalDataset) -> dict:
    return {"grid": ds.grid.points.tolist(), "values": ds.values.tolist()}


def _dataset_from_doc(d: dict) -> FunctionalDataset:
    return FunctionalDataset(Grid(d["grid"]), np.asarray(d["values"], dtype=float))


class Detector:
    """Base class; subclasses implement ``_fit``, ``_score`` and the state documents."""

    family = ""

    def __init__(self, name: str, params: dict, seed: int = 0, n_jobs: int = 1):
        self.name = name
        self.params = params
        self.seed = int(seed)
        self.n_jobs = int(n_jobs)
        self.grid: Grid | None = None

    def fit(self, dataset: FunctionalDataset) -> Detector:
        self.grid = dataset.grid
        self._fit(dataset)
        return self

    def score(self, dataset: FunctionalDataset) -> np.ndarray:
        if self.grid is None:
            raise ContractError(f"detector {self.name} is not fitted")
        dataset.check_grid(self.grid)
        return np.asarray(self._score(dataset), dtype=float)

    def fit_score(self, dataset: FunctionalDataset) -> np.ndarray:
        self.fit(dataset)
        return self.score(dataset)

    def describe(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "seed": self.seed}

    def to_dict(self) -> dict:
        if self.grid is None:
            raise ContractError(f"detector {self.name} is not fitted")
        return {**self.describe(), "state": self._state()}

    @staticmethod
    def from_dict(doc: dict) -> Detector:
        det = make_detector(doc["name"], doc["params"], seed=doc.get("seed", 0))
        det._load(doc["state"])
        return det

    def _fit(self, dataset):
        raise NotImplementedError

    def _score(self, dataset):
        raise NotImplementedError

    def _state(self) -> dict:
        raise NotImplementedError

    def _load(self, state: dict) -> None:
        raise NotImplementedError


class DepthDetector(Detector):
    family = "depth"

    def _cfg(self) -> IntegratedDepthConfig:
        return IntegratedDepthConfig(self.params["base"], self.params["weights"])

    def _fit(self, dataset):
        self.cfg = self._cfg()
        self.training = dataset

    def _score(self, dataset):
        return depth_to_score(integrated_depths(dataset, self.training, self.cfg))

    def _state(self):
        return {"training": _dataset_doc(self.training)}

    def _load(self, state):
        self.fit(_dataset_from_doc(state["training"]))


class AchDetector(Detector):
    family = "ach"

    def _cfg(self) -> AchConfig:
        p = self.params
        return AchConfig(J=p["J"], n_subsets=p["n_subsets"], seed=self.seed,
                         exact_limit=p["exact_limit"], n_jobs=self.n_jobs)

    def _fit(self, dataset):
        self.training = dataset
        self.model = AchModel(dataset, self._cfg())

    def _score(self, dataset):
        return depth_to_score(self.model.depths(dataset.values))

    def fit_score(self, dataset):
        self.fit(dataset)
        # each training curve is left out of the subsets it belongs to
        return depth_to_score(self.model.depths(dataset.values, exclude=np.arange(dataset.n)))

    def _state(self):
        # subsets are replayed from the seed
        return {"training": _dataset_doc(self.training)}

    def _load(self, state):
        self.fit(_dataset_from_doc(state["training"]))


class FifDetector(Detector):
    family = "fif"

    def _fit(self, dataset):
        p = self.params
        cfg = FifConfig(n_trees=p["n_trees"], subsample=p["subsample"], alpha=p["alpha"],
                        height_limit=p["height_limit"], seed=self.seed, dictionary=p["dictionary"],
                        atoms_per_tree=p["atoms_per_tree"], n_jobs=self.n_jobs)
        self.forest = fif_fit(dataset, cfg)

    def _score(self, dataset):
        return self.forest.score(dataset)

    def _state(self):
        return {"forest": self.forest.to_dict()}

    def _load(self, state):
        self.forest = FiForest.from_dict(state["forest"])
        self.grid = self.forest.grid


def _if_config(params: dict, seed: int, n_jobs: int) -> IForestConfig:
    return IForestConfig(n_trees=params["n_trees"], subsample=params["subsample"], seed=seed, n_jobs=n_jobs)


class FeatureMapDetector(Detector):
    family = "featuremap"

    def _fit(self, dataset):
        p = self.params
        self.model = featuremap_fit(dataset, p["map"], p["base"], _if_config(p, self.seed, self.n_jobs))

    def _score(self, dataset):
        return self.model.score(dataset)

    def _state(self):
        return {"training": _dataset_doc(self.model.training), "forest": self.model.forest.to_dict()}

    def _load(self, state):
        training = _dataset_from_doc(state["training"])
        base = self.params["base"]
        summ = column_summaries(training.values, with_medcouple=(base == "asym_projection"))
        self.model = FeatureMapModel(training, self.params["map"], base,
                                     IForest.from_dict(state["forest"]), summ)
        self.grid = training.grid


class FilterDetector(Detector):
    family = "filter"

    def _features(self, dataset) -> np.ndarray:
        if self.params["filter"] == "fpca":
            return fpca_transform(self.fpca, dataset)
        return haar_projection(dataset, self.params["level"])

    def _fit(self, dataset):
        p = self.params
        if p["filter"] not in ("fpca", "haar"):
            raise ContractError(f"unknown filter {p['filter']!r}")
        self.fpca = fpca_fit(dataset, p["k"]) if p["filter"] == "fpca" else None
        feats = self._features(dataset)
        if p["learner"] == "if":
            self.learner = iforest_fit(feats, _if_config(p, self.seed, self.n_jobs))
        elif p["learner"] == "lof":
            self.learner = lof_fit(feats, p["lof_k"])
        else:
            raise ContractError(f"unknown learner {p['learner']!r}")

    def _score(self, dataset):
        return self.learner.score(self._features(dataset))

    def fit_score(self, dataset):
        self.fit(dataset)
        if isinstance(self.learner, LofModel):
            # LOF of a training point is taken with respect to the other points
            return self.learner.training_lof.copy()
        return self.score(dataset)

    def _state(self):
        return {"grid": self.grid.points.tolist(),
                "fpca": None if self.fpca is None else self.fpca.to_dict(),
                "learner": self.learner.to_dict()}

    def _load(self, state):
        self.grid = Grid(state["grid"])
        self.fpca = None if state["fpca"] is None else FpcaModel.from_dict(state["fpca"])
        doc = state["learner"]
        self.learner = IForest.from_dict(doc) if doc["kind"] == "iforest" else LofModel.from_dict(doc)


_FAMILIES = {"depth": DepthDetector, "ach": AchDetector, "fif": FifDetector,
             "featuremap": FeatureMapDetector, "filter": FilterDetector}


def make_detector(name: str, params: dict | None = None, seed: int = 0, n_jobs: int = 1) -> Detector:
    """Detector ``name`` from the registry with ``params`` overriding its defaults."""
    if name not in REGISTRY:
        raise ContractError(f"unknown detector {name!r}; expected one of {sorted(REGISTRY)}")
    family, defaults = REGISTRY[name]
    params = params or {}
    unknown = set(params) - set(defaults)
    if unknown:
        raise ContractError(f"unknown parameters for {name}: {sorted(unknown)}")
    full = copy.deepcopy(defaults)
    full.update(params)
    return _FAMILIES[family](name, full, seed=seed, n_jobs=n_jobs)
