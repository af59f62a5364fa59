"""Wedge accuracy comparison: nearly-magnetic CSIE versus 0.1-CFIE.

Runs the three committed wedge configs (EFIE reference, CSIE with
alpha=9, CFIE with beta=0.1) through the CLI driver and compares the
far-field patterns in the theta=90 plane.  The CSIE with strongly
weighted magnetic currents avoids the identity-operator inaccuracy
that dominates an MFIE-heavy CFIE on sharp-edged geometry.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from momscat.cli import main as momscat_main, compare_runs

ROOT = Path(__file__).resolve().parent.parent


def main():
    for name in ("wedge_efie", "wedge_mcsie", "wedge_cfie01"):
        status = momscat_main(["--config", str(ROOT / "data" / "configs" / f"{name}.cfg")])
        if status != 0:
            raise SystemExit(f"{name} failed with exit code {status}")

    print()
    for name, label in (("wedge_mcsie", "M-CSIE (alpha=9)"),
                        ("wedge_cfie01", "0.1-CFIE")):
        eps_theta, eps_phi = compare_runs("out/wedge_efie.csv", f"out/{name}.csv")
        print(f"{label:18s} max error vs EFIE: {max(eps_theta, eps_phi):7.2f} dB")


if __name__ == "__main__":
    main()
