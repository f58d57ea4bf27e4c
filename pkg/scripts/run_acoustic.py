"""Run the acoustic preset for every model; extra flags go to the CLI.

    python scripts/run_acoustic.py --out runs/acoustic [--nx N ...]
"""

import sys
from pathlib import Path

from tigre.cli import main

MODELS = ("euler", "igr", "tigre")


def run_all(argv):
    out = "runs/acoustic"
    if "--out" in argv:
        i = argv.index("--out")
        out = argv[i + 1]
        argv = argv[:i] + argv[i + 2 :]
    codes = {}
    for model in MODELS:
        codes[model] = main(["--preset", "acoustic", "--model", model, "--out", str(Path(out) / model), *argv])
    for model, code in codes.items():
        print(f"{model}: exit {code}")
    return max(codes.values())


if __name__ == "__main__":
    sys.exit(run_all(sys.argv[1:]))
