"""Lowest dispersion branches of the symmetric channel, written as CSV, with an optional plot.

Usage: python3 scripts/dispersion_curves.py [out_dir]
"""
import sys
from pathlib import Path

from crackmodes import cli, io

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out/dispersion")
code = cli.main(["dispersion", "--branches", "3", "--xi", "0:3:0.01", "--out", str(out)])
if code:
    sys.exit(code)
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)
rows = io.read_csv(out / "dispersion.csv")
th = io.read_json(out / "threshold.json")
fig, ax = plt.subplots()
for k in sorted({r["branch"] for r in rows}):
    pts = [(float(r["xi"]), float(r["omega"])) for r in rows if r["branch"] == k]
    ax.plot(*zip(*pts), label=f"branch {k}")
ax.axhline(th["Lambda"], ls="--", c="k", lw=0.8)
ax.set_xlabel("xi")
ax.set_ylabel("omega")
ax.legend()
fig.savefig(out / "dispersion.png", dpi=120)
