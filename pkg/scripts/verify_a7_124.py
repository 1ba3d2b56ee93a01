"""End-to-end run on the 1/7(1,2,4) resolution: surfaces, Homs, twists, orthogonality, G = Br4.

    python scripts/verify_a7_124.py --out results/
"""

import argparse
import json
import time
from pathlib import Path

from qbraid.braid_group import verify_iso_G_Br4
from qbraid.cli import verify_fan
from qbraid.quotient_fan import load_fixture


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, help="directory for verify_report.json and iso_certificate.json")
    args = ap.parse_args()

    fan = load_fixture("a7_124")
    start = time.perf_counter()
    report = verify_fan(fan)
    t_verify = time.perf_counter() - start
    start = time.perf_counter()
    cert = verify_iso_G_Br4()
    t_iso = time.perf_counter() - start

    for name, check in report.checks.items():
        print(f"{name:16s} {check['status']}")
    print(f"verify: {t_verify:.3f}s, iso certificate: {t_iso:.3f}s ({cert.status})")

    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "verify_report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True))
        (args.out / "iso_certificate.json").write_text(json.dumps(cert.to_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
