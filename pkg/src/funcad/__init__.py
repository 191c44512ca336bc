"""Anomaly detection for functional data: depths, isolation forests and filtering pipelines."""

from .core import FunctionalDataset, Grid
from .detectors import REGISTRY, make_detector

__all__ = ["FunctionalDataset", "Grid", "REGISTRY", "make_detector"]
