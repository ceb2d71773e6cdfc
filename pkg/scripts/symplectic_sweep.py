#!/usr/bin/env python3
"""Residual statistics for the Darboux construction over random structures.

Samples structure parameters (a, b, alpha) away from the degenerate surface,
builds each frame, and histograms the block-form / orthogonality /
canonicity residuals together with the bracket-compatibility residuals of a
chosen potential.  Prints percentile statistics; optionally dumps the raw
sweep as JSON.

Usage:
    python scripts/symplectic_sweep.py --trials 500 --seed 42 --out sweep.json
"""

import argparse
import sys

import numpy as np

from holomech import (
    SymplecticParams,
    SystemSpec,
    build_real_J,
    darboux_frame,
    frame_residuals,
    verify_compatibility,
)
from holomech.output import json_text, write_text_atomic


def sample_params(rng, margin=0.05):
    while True:
        a, b = rng.uniform(-2, 2, size=2)
        alpha = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        p = SymplecticParams(float(a), float(b), alpha)
        if abs(p.degeneracy_defect) > margin:
            return p


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=500)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--potential", default="i*z^3")
    ap.add_argument("--mass", type=float, default=0.5)
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    spec = SystemSpec.from_source(args.potential, args.mass)
    keys = ("block_form", "orthogonality", "canonicity",
            "position_equation", "momentum_equation")
    data = {k: [] for k in keys}
    r_minus_values = []

    for _ in range(args.trials):
        params = sample_params(rng)
        frame = darboux_frame(params)
        res = frame_residuals(frame, build_real_J(params))
        compat = verify_compatibility(params, spec, rng.uniform(-2, 2, size=4))
        res["position_equation"] = compat["residuals"]["position_equation"]
        res["momentum_equation"] = compat["residuals"]["momentum_equation"]
        r_minus_values.append(frame.r_minus)
        for k in keys:
            data[k].append(res[k])

    print(f"sweep: {args.trials} trials, seed {args.seed}, "
          f"potential {args.potential}")
    print(f"{'residual':20s} {'p50':>10s} {'p95':>10s} {'max':>10s}")
    stats = {}
    for k in keys:
        arr = np.array(data[k])
        p50, p95, mx = np.percentile(arr, [50, 95]).tolist() + [float(arr.max())]
        stats[k] = {"p50": p50, "p95": p95, "max": mx}
        print(f"{k:20s} {p50:10.2e} {p95:10.2e} {mx:10.2e}")
    print(f"r_minus range: [{min(r_minus_values):.3e}, {max(r_minus_values):.3e}]")

    if args.out:
        write_text_atomic(args.out, json_text({
            "trials": args.trials, "seed": args.seed,
            "potential": args.potential, "mass": args.mass,
            "stats": stats}))
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
