"""Curves and their 10-component FPCA reconstructions on a simulated shape-anomaly set.

Usage: python scripts/plot_reconstruction.py [--seed 0] [--out reconstruction.svg]

Draws the best reconstructed normal curve and the worst reconstructed anomaly
with their reconstructions, and prints the mean reconstruction errors.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from funcad.filtering import fpca_fit, fpca_reconstruct, fpca_transform, reconstruction_error
from funcad.simulate import SimulationConfig
from funcad.svg import PALETTE, _axes, _document, _Frame, _legend


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--model", default="shape")
    ap.add_argument("--out", default="reconstruction.svg")
    args = ap.parse_args()

    data = SimulationConfig(args.model, seed=args.seed).build()
    ds = data.dataset
    model = fpca_fit(ds, args.k)
    recon = fpca_reconstruct(model, fpca_transform(model, ds)).values
    err = reconstruction_error(model, ds)
    anomalies, normals = np.flatnonzero(data.labels == 1), np.flatnonzero(data.labels == -1)
    print(f"mean error: anomalies {err[anomalies].mean():.4f}, normals {err[normals].mean():.4f}, "
          f"ratio {err[anomalies].mean() / err[normals].mean():.2f}")

    good, bad = normals[np.argmin(err[normals])], anomalies[np.argmax(err[anomalies])]
    series = {"normal": ds.values[good], "normal (recon.)": recon[good],
              "anomaly": ds.values[bad], "anomaly (recon.)": recon[bad]}
    t = ds.grid.points
    lo = min(v.min() for v in series.values())
    hi = max(v.max() for v in series.values())
    frame = _Frame((float(t[0]), float(t[-1])), (float(lo), float(hi)))
    body = _axes(frame, f"{args.k}-component FPCA reconstruction", "t", "X(t)")
    colors = [PALETTE[0], PALETTE[0], PALETTE[1], PALETTE[1]]
    for (name, y), color in zip(series.items(), colors):
        dash = ' stroke-dasharray="5,3"' if "recon" in name else ""
        pts = " ".join(f"{float(a):.2f},{float(b):.2f}" for a, b in zip(frame.x(t), frame.y(y)))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2"{dash} points="{pts}"/>')
    body += _legend(list(series), colors)
    Path(args.out).write_text(_document(body), encoding="utf-8")
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
