#!/usr/bin/env python3
"""Evaluate the two proposed membrane designs and a small sweep grid.

Writes designs.csv and designs_pareto.json; prints the headline numbers
for the node-terminated (t_d = 198 nm) and antinode-terminated
(t_d = 132 nm) membranes.
"""

import csv
import sys

from cavityforge.cli import main

OUT = "designs.csv"
PARETO = "designs_pareto.json"

if __name__ == "__main__":
    rc = main(["design",
               "--t-d-nm", "132", "198", "264",
               "--l-nm", "478", "637", "800",
               "--terminations", "node", "antinode",
               "--pareto-json", PARETO, "-o", OUT, *sys.argv[1:]])
    if rc != 0:
        sys.exit(rc)
    with open(OUT, encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["valid"] != "true" or row["termination_consistent"] != "true":
                continue
            if (row["t_d_nm"], row["termination"]) in (("198", "node"),
                                                       ("132", "antinode")):
                print(f"t_d={row['t_d_nm']} nm {row['termination']}: "
                      f"E_vac={float(row['E_vac_diamond_V_per_m'])/1e3:.1f} kV/m, "
                      f"F_P_zpl={float(row['F_P_zpl']):.0f}, "
                      f"eta_zpl={100*float(row['eta_zpl']):.1f} %, "
                      f"Q_required={float(row['Q_required']):.0f}")
    print(f"wrote {OUT} and {PARETO}")
