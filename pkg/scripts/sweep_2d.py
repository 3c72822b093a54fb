"""Gap sweep of the strip for both parity classes, followed by the power-law fit.

Usage: python3 scripts/sweep_2d.py [out_dir] [workers]
"""
import sys

from crackmodes import cli

out = sys.argv[1] if len(sys.argv) > 1 else "out/sweep_2d"
workers = sys.argv[2] if len(sys.argv) > 2 else "1"
code = cli.main(["solve", "--dimension", "2", "--class", "all", "--route", "both", "--workers", workers, "--out", out])
code = code or cli.main(["fit", "--out", out])
sys.exit(code)
