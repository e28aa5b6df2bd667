#!/usr/bin/env python3
"""Fit l1 and MCP paths on one synthetic instance and render both solution paths.

Reproduces the classic two-panel picture: the l1 path shrinks everything
smoothly while the MCP path lets large coefficients escape the bias once they
clear gamma*lambda.
"""

import argparse
import os
import tempfile

from sparsepath import generate_synthetic, save_csv
from sparsepath.cli import main as cli_main


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--d", type=int, default=100)
    ap.add_argument("--sparsity", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--gamma", type=float, default=1.25)
    ap.add_argument("--outdir", default="paths_demo")
    args = ap.parse_args()

    os.makedirs(args.outdir, exist_ok=True)
    ds, _ = generate_synthetic(args.n, args.d, args.sparsity, 0.5, seed=args.seed,
                               noise_sd=0.5)
    with tempfile.TemporaryDirectory() as td:
        data_csv = os.path.join(td, "data.csv")
        save_csv(ds, data_csv)
        for method, extra in (("l1", []), ("mcp", ["--gamma", str(args.gamma)])):
            prefix = os.path.join(td, method)
            rc = cli_main(["fit", "--input", data_csv, "--has-header", "--response", "y",
                           "--method", method, "--output", prefix, *extra])
            assert rc == 0, f"fit failed for {method}"
            rc = cli_main(["plot", "--fit", prefix,
                           "--output", os.path.join(args.outdir, f"{method}_path.csv"),
                           "--svg", os.path.join(args.outdir, f"{method}_path.svg")])
            assert rc == 0, f"plot failed for {method}"
    print(f"wrote {args.outdir}/l1_path.svg and {args.outdir}/mcp_path.svg")


if __name__ == "__main__":
    main()
