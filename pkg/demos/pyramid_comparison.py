"""Pyramid accuracy ladder: MFIE, CFIE, and CSIE against the EFIE.

Runs the four committed pyramid configs and prints the max error
metric of each formulation in the phi=90 plane with the EFIE pattern
as reference.  Expected ordering: the MFIE is worst, the equal-weight
CFIE inherits part of its error, and the CSIE with alpha=1 stays near
the discretization floor.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from momscat.cli import main as momscat_main, compare_runs

ROOT = Path(__file__).resolve().parent.parent


def main():
    for name in ("pyramid_efie", "pyramid_mfie", "pyramid_cfie", "pyramid_csie"):
        status = momscat_main(["--config", str(ROOT / "data" / "configs" / f"{name}.cfg")])
        if status != 0:
            raise SystemExit(f"{name} failed with exit code {status}")

    print()
    for name, label in (("pyramid_mfie", "MFIE"),
                        ("pyramid_cfie", "CFIE (beta=0.5)"),
                        ("pyramid_csie", "CSIE (alpha=1)")):
        eps_theta, eps_phi = compare_runs("out/pyramid_efie.csv", f"out/{name}.csv")
        print(f"{label:16s} max error vs EFIE: {max(eps_theta, eps_phi):7.2f} dB")


if __name__ == "__main__":
    main()
