"""Drive the command-line entry point against the shipped configs.

Writes each report into demos/output/<subcommand>/ and prints the exit
status; the same thing works from a shell, e.g.

    tci-spde audit --config demos/configs/heat_reference.json --out /tmp/r
"""

import json
import os

from tci_spde.cli import main

HERE = os.path.dirname(__file__)
CONFIGS = os.path.join(HERE, "configs")
OUTPUT = os.path.join(HERE, "output")

runs = [
    ("constants", "constants_minimal.json"),
    ("audit", "heat_reference.json"),
    ("simulate", "heat_reference.json"),
    ("verify-t2", "heat_reference.json"),
    ("verify-t1", "burgers_reference.json"),
    ("audit", "ns2d_reference.json"),
]

for subcommand, config in runs:
    out = os.path.join(OUTPUT, f"{subcommand}_{config.split('.')[0]}")
    code = main([subcommand, "--config", os.path.join(CONFIGS, config),
                 "--seed", "0", "--out", out])
    with open(os.path.join(out, "report.json")) as fh:
        report = json.load(fh)
    print(f"-> exit {code}, all_passed={report['all_passed']}, "
          f"artifacts in {os.path.relpath(out, HERE)}\n")
