"""Acceptance suite: simulation-study orderings, oracle and invariant suites.

Each criterion prints one ``PASS`` / ``FAIL`` line (also collected in the
terminal summary). Run alone with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import subprocess
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from funcad.detectors import make_detector
from funcad.filtering import fpca_fit, reconstruction_error
from funcad.metrics import evaluate
from funcad.simulate import SimulationConfig

SEEDS = range(5)
N, P = 400, 512
DEPTHS = ("fT", "fSDO", "fAO")
FIF_PARAMS = {"alpha": 0.5, "dictionary": "brownian", "n_trees": 100}
SWEEP = (0.01, 0.02, 0.03, 0.04)
TESTS = Path(__file__).resolve().parent

ORACLES = [
    "test_udepth.py::test_medcouple_matches_enumeration_oracle",
    "test_udepth.py::test_medcouple_with_heavy_ties_matches_oracle",
    "test_metrics.py::test_auc_matches_pairwise_oracle",
    "test_metrics.py::test_ap_matches_threshold_oracle",
    "test_udepth.py::test_tukey_matches_counting",
    "test_ach.py::test_hull_area_matches_fan_triangulation",
    "test_ach.py::test_exact_enumeration_agrees_with_formula",
    "test_baselines.py::test_lof_matches_definition",
    "test_filtering.py::test_scores_match_dense_eigensolver",
]

RESULTS: list[str] = []


def _record(criterion: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    RESULTS.append(line)
    print(line)


@lru_cache(maxsize=None)
def _data(model: str, fraction: float, seed: int):
    return SimulationConfig(model, fraction, N, P, seed).build()


def _run(name: str, model: str, fraction: float, seed: int, params=None):
    data = _data(model, fraction, seed)
    scores = make_detector(name, params, seed=seed).fit_score(data.dataset)
    return evaluate(scores, data.labels)


def _aucs(names, model, fraction, seeds=SEEDS, params=None) -> dict[str, np.ndarray]:
    return {name: np.array([_run(name, model, fraction, s, params if name not in DEPTHS else None).auc
                            for s in seeds]) for name in names}


def _fmt(a) -> str:
    return "[" + ", ".join(f"{v:.3f}" for v in a) + "]"


def test_criterion_1_magnitude1_depths():
    start = time.perf_counter()
    reps = {d: [_run(d, "magnitude1", 0.05, s) for s in SEEDS] for d in DEPTHS}
    elapsed = time.perf_counter() - start
    auc = min(r.auc for rs in reps.values() for r in rs)
    pc = min(r.p_c for rs in reps.values() for r in rs)
    ok = auc >= 0.95 and pc >= 0.9 and elapsed < 120
    _record(1, ok, f"magnitude1 5%: min AUC {auc:.3f} (>= 0.95), min p_c {pc:.3f} (>= 0.9), "
                   f"{elapsed:.1f}s (< 120s)")
    assert ok


def _beats_depths(method: str, model: str, criterion: int, params=None):
    start = time.perf_counter()
    aucs = _aucs((method, *DEPTHS), model, 0.05, params=params)
    elapsed = time.perf_counter() - start
    best_depth = np.max([aucs[d] for d in DEPTHS], axis=0)
    mean = aucs[method].mean()
    ordered = bool(np.all(aucs[method] > best_depth))
    ok = mean >= 0.9 and ordered and elapsed < 300
    _record(criterion, ok, f"{model} 5%: {method} AUC {_fmt(aucs[method])} mean {mean:.3f} (>= 0.90), "
                           f"best depth {_fmt(best_depth)}, above on every seed: {ordered}, "
                           f"{elapsed:.1f}s (< 300s)")
    assert ok


def test_criterion_2_ach_magnitude2():
    _beats_depths("ACH", "magnitude2", 2, {"J": 2})


def test_criterion_3_fif_shape():
    _beats_depths("FIF", "shape", 3, FIF_PARAMS)


def test_criterion_4_isolated():
    aucs = _aucs(("ACH", *DEPTHS), "isolated", 0.05, params={"J": 2})
    depth_aucs = np.array([aucs[d] for d in DEPTHS])
    wins = int(np.sum(np.all(aucs["ACH"] > depth_aucs, axis=0)))
    hard = bool(np.all(depth_aucs <= 0.7))
    ok = hard and wins >= 4
    _record(4, ok, f"isolated 5%: max depth AUC {depth_aucs.max():.3f} (<= 0.7), "
                   f"ACH {_fmt(aucs['ACH'])} above every depth on {wins}/5 seeds (>= 4)")
    assert ok


@pytest.mark.slow
def test_criterion_5_fraction_sweep():
    details, ok = [], True
    for f in SWEEP:
        mag1 = _aucs(DEPTHS, "magnitude1", f)
        sep = int(np.sum(np.min([mag1[d] for d in DEPTHS], axis=0) >= 0.95))
        counts = [sep]
        for method, model, params in (("ACH", "magnitude2", {"J": 2}), ("FIF", "shape", FIF_PARAMS)):
            aucs = _aucs((method, *DEPTHS), model, f, params=params)
            best = np.max([aucs[d] for d in DEPTHS], axis=0)
            counts.append(int(np.sum(aucs[method] > best)))
        ok &= min(counts) >= 4
        details.append(f"{f:.0%} depths/ACH/FIF {counts[0]}/{counts[1]}/{counts[2]} of 5")
    _record(5, ok, "; ".join(details) + " (each >= 4)")
    assert ok


def _pytest(*args) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *args],
                          cwd=TESTS, capture_output=True, text=True)


def _summary(proc: subprocess.CompletedProcess) -> str:
    lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
    return lines[-1].strip("= ") if lines else "no output"


def test_criterion_6_oracle_suite():
    proc = _pytest(*ORACLES)
    ok = proc.returncode == 0
    _record(6, ok, f"{len(ORACLES)} oracle comparisons: {_summary(proc)}")
    assert ok, proc.stdout[-3000:]


def test_criterion_7_invariant_suite():
    proc = _pytest("-m", "invariant", "-rf")
    failed = [ln.split(" - ")[0].removeprefix("FAILED ") for ln in proc.stdout.splitlines()
              if ln.startswith("FAILED")]
    ok = proc.returncode == 0
    extra = f"; failing: {', '.join(failed)}" if failed else ""
    _record(7, ok, f"property tests (>= 200 instances each): {_summary(proc)}{extra}")
    assert ok, f"failing property tests: {failed}"


def test_criterion_8_fpca_reconstruction():
    ratios = []
    for s in SEEDS:
        data = _data("shape", 0.05, s)
        err = reconstruction_error(fpca_fit(data.dataset, 10), data.dataset)
        ratios.append(err[data.labels == 1].mean() / err[data.labels == -1].mean())
    ok = min(ratios) >= 2.0
    _record(8, ok, f"shape 5%: anomaly / normal mean 10-component error {_fmt(ratios)} (>= 2)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
