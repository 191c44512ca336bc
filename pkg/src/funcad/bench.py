"""Config-driven benchmark: every detector on every dataset, with report files and plots.

A config is one JSON document::

    {
      "seed": 0,
      "alpha": null,
      "output": "bench_out",
      "datasets": [
        {"name": "shape", "simulate": {"model": "shape", "fraction": 0.05}},
        {"name": "mine", "curves": "curves.csv", "labels": "labels.csv", "grid_mode": "header-row"}
      ],
      "detectors": ["fT", {"name": "FIF", "label": "FIF a=1", "params": {"alpha": 1.0}}]
    }

``alpha`` is the flagged fraction of the decision rule (null: the labeled
anomaly fraction). Each (dataset, detector) cell gets its own seed derived
from the config seed, so results do not depend on the number of threads.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .core import ContractError, load_csv, load_labels
from .detectors import REGISTRY, make_detector
from .metrics import evaluate, pr_curve, roc_curve
from .simulate import LabeledDataset, SimulationConfig
from .svg import curves_svg

OMITTED = ["OCSVM pipelines are not implemented"]


def library_version() -> str:
    try:
        return version("funcad")
    except PackageNotFoundError:
        return "unknown"


@dataclass(frozen=True)
class DatasetEntry:
    name: str
    simulate: dict | None = None
    curves: str | None = None
    labels: str | None = None
    grid_mode: str = "header-row"
    grid_path: str | None = None

    def load(self, base_dir: Path, seed: int) -> tuple[LabeledDataset, dict]:
        if self.simulate is not None:
            spec = {"seed": seed, **self.simulate}
            cfg = SimulationConfig(**spec)
            return cfg.build(), {"simulate": cfg.to_dict()}
        curves = base_dir / self.curves
        grid_path = None if self.grid_path is None else base_dir / self.grid_path
        ds = load_csv(curves, self.grid_mode, grid_path)
        labels = load_labels(base_dir / self.labels, ds.n)
        return LabeledDataset(ds, labels), {"curves": str(curves), "labels": str(base_dir / self.labels)}


@dataclass(frozen=True)
class DetectorEntry:
    name: str
    label: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class BenchConfig:
    datasets: list[DatasetEntry]
    detectors: list[DetectorEntry]
    seed: int = 0
    alpha: float | None = None
    output: str = "bench_out"
    base_dir: Path = Path(".")

    def __post_init__(self):
        if not self.datasets or not self.detectors:
            raise ContractError("a benchmark needs at least one dataset and one detector")
        for kind, names in (("dataset", [d.name for d in self.datasets]),
                            ("detector", [d.label for d in self.detectors])):
            if len(set(names)) != len(names):
                raise ContractError(f"{kind} names must be unique, got {names}")

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path = Path(".")) -> BenchConfig:
        allowed = {"datasets", "detectors", "seed", "alpha", "output"}
        unknown = set(doc) - allowed
        if unknown:
            raise ContractError(f"unknown config fields {sorted(unknown)}")
        datasets = []
        for d in doc.get("datasets", []):
            if ("simulate" in d) == ("curves" in d):
                raise ContractError(f"dataset {d.get('name')!r} needs exactly one of 'simulate' or 'curves'")
            if "curves" in d and "labels" not in d:
                raise ContractError(f"dataset {d.get('name')!r} has curves but no labels")
            datasets.append(DatasetEntry(**d))
        detectors = []
        for d in doc.get("detectors", []):
            if isinstance(d, str):
                d = {"name": d}
            if d["name"] not in REGISTRY:
                raise ContractError(f"unknown detector {d['name']!r}; expected one of {sorted(REGISTRY)}")
            detectors.append(DetectorEntry(d["name"], d.get("label", d["name"]), d.get("params", {})))
        return cls(datasets, detectors, int(doc.get("seed", 0)), doc.get("alpha"),
                   doc.get("output", "bench_out"), base_dir)

    @classmethod
    def load(cls, path) -> BenchConfig:
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ContractError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(doc, path.parent)

    def to_dict(self) -> dict:
        return {"seed": self.seed, "alpha": self.alpha, "output": self.output,
                "datasets": [{k: v for k, v in vars(d).items() if v is not None} for d in self.datasets],
                "detectors": [{"name": d.name, "label": d.label, "params": d.params} for d in self.detectors]}


def cell_seed(seed: int, i_dataset: int, j_detector: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(i_dataset, j_detector)).generate_state(1)[0])


def dataset_seed(seed: int, i_dataset: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(i_dataset,)).generate_state(1)[0])


@dataclass
class Cell:
    dataset: str
    detector: str
    status: str
    detector_config: dict
    metrics: dict | None = None
    threshold_rule: dict | None = None
    seconds: float = 0.0
    error: str | None = None
    scores: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {"dataset": self.dataset, "detector": self.detector, "status": self.status,
                "detector_config": self.detector_config, "metrics": self.metrics,
                "threshold_rule": self.threshold_rule, "seconds": self.seconds, "error": self.error}


@dataclass
class BenchmarkReport:
    config: dict
    datasets: list[dict]
    cells: list[Cell]
    version: str = field(default_factory=library_version)

    @property
    def failed(self) -> list[Cell]:
        return [c for c in self.cells if c.status != "ok"]

    def to_dict(self) -> dict:
        return {"version": self.version, "config": self.config, "datasets": self.datasets,
                "omitted": OMITTED, "cells": [c.to_dict() for c in self.cells]}

    def cell(self, dataset: str, detector: str) -> Cell:
        for c in self.cells:
            if c.dataset == dataset and c.detector == detector:
                return c
        raise KeyError((dataset, detector))


def _run_cell(entry: DetectorEntry, seed: int, data: LabeledDataset, dataset_name: str,
              alpha: float | None) -> Cell:
    start = time.perf_counter()
    conf = {"name": entry.name, "params": dict(entry.params), "seed": seed}
    try:
        det = make_detector(entry.name, entry.params, seed=seed)
        conf = det.describe()
        scores = det.fit_score(data.dataset)
        rep = evaluate(scores, data.labels, alpha)
    except Exception as exc:  # a failing cell must not stop the run
        return Cell(dataset_name, entry.label, "failed", conf, seconds=time.perf_counter() - start,
                    error=f"{type(exc).__name__}: {exc}")
    metrics = {"f1": rep.f1, "ap": rep.ap, "auc": rep.auc, "p_c": rep.p_c}
    return Cell(dataset_name, entry.label, "ok", conf, metrics, rep.threshold_rule,
                time.perf_counter() - start, scores=scores)


def run_bench(cfg: BenchConfig, threads: int = 1) -> tuple[BenchmarkReport, dict[str, LabeledDataset]]:
    loaded: dict[str, LabeledDataset] = {}
    described = []
    for i, d in enumerate(cfg.datasets):
        data, source = d.load(cfg.base_dir, dataset_seed(cfg.seed, i))
        loaded[d.name] = data
        described.append({"name": d.name, "n": data.dataset.n, "p": data.dataset.p,
                          "n_anomalies": int(np.sum(data.labels == 1)), "source": source})
    jobs = [(cfg.detectors[j], cell_seed(cfg.seed, i, j), loaded[d.name], d.name, cfg.alpha)
            for i, d in enumerate(cfg.datasets) for j in range(len(cfg.detectors))]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            cells = list(pool.map(lambda job: _run_cell(*job), jobs))
    else:
        cells = [_run_cell(*job) for job in jobs]
    return BenchmarkReport(cfg.to_dict(), described, cells), loaded


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def write_report(report: BenchmarkReport, loaded: dict[str, LabeledDataset], out_dir) -> list[Path]:
    """``report.json``, ``report.csv`` and ROC / PR SVGs per dataset."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "report.json", out / "report.csv"]
    with open(paths[0], "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(paths[1], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dataset", "detector", "status", "f1", "ap", "auc", "p_c", "alpha", "seconds", "error"])
        for c in report.cells:
            m = c.metrics or {}
            alpha = (c.threshold_rule or {}).get("alpha", "")
            w.writerow([c.dataset, c.detector, c.status, *(repr(m[k]) if k in m else "" for k in ("f1", "ap", "auc", "p_c")),
                        alpha, f"{c.seconds:.3f}", c.error or ""])
    for name, data in loaded.items():
        ok = [c for c in report.cells if c.dataset == name and c.status == "ok"]
        if not ok or np.all(data.labels == 1) or np.all(data.labels != 1):
            continue
        roc = {c.detector: roc_curve(c.scores, data.labels) for c in ok}
        pr = {c.detector: np.vstack([[0.0, 1.0], pr_curve(c.scores, data.labels)]) for c in ok}
        for kind, series, xl, yl, step in (("roc", roc, "false positive rate", "true positive rate", False),
                                           ("pr", pr, "recall", "precision", True)):
            p = out / f"{kind}_{_safe(name)}.svg"
            p.write_text(curves_svg(series, f"{kind.upper()}: {name}", xl, yl, step=step), encoding="utf-8")
            paths.append(p)
    return paths
