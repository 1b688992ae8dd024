"""Write the data tables behind fig1-fig4 into an output directory.

    python3 scripts/reproduce_figures.py [OUT] [--workers N]

Same as ``clocksta --out OUT figures --id all``.
"""

import argparse
import sys

from clocksta.cli import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("out", nargs="?", default="figures_out")
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    sys.exit(main(["--out", a.out, "--workers", str(a.workers), "--seedless", "figures", "--id", "all"]))
