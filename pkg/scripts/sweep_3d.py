"""Gap sweep of the plate for the channels m = 0 and m = 1, followed by the power-law fit.

Usage: python3 scripts/sweep_3d.py [out_dir] [workers]
"""
import sys

from crackmodes import cli

out = sys.argv[1] if len(sys.argv) > 1 else "out/sweep_3d"
workers = sys.argv[2] if len(sys.argv) > 2 else "1"
code = cli.main(["solve", "--dimension", "3", "--class", "all", "--workers", workers, "--out", out])
code = code or cli.main(["fit", "--dimension", "3", "--out", out])
sys.exit(code)
