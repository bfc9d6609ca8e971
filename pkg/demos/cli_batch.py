"""
Scenario files and the command line
===================================

Writes a small scenario file and runs the ``mintraj`` subcommands on it.
Equivalent shell usage::

    mintraj classify --input scenarios.yaml --format tabular
    mintraj verify --input scenarios.yaml
"""
import tempfile
from pathlib import Path

from mintraj.cli import main

scenarios = """\
schema_version: 1
scenarios:
  - {name: cruise, v0: 10, T: 5, pT: 60, u_min: -3, u_max: 2, v_min: 0, v_max: 14}
  - {name: hurry, v0: 10, T: 5, pT: 64, u_min: -3, u_max: 2, v_min: 0, v_max: 14}
  - {name: yield, t0: 2, p0: 40, v0: 12, T: 8, pT: 90, u_min: -3, u_max: 2, v_min: 4, v_max: 14}
"""

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "scenarios.yaml"
    path.write_text(scenarios)
    for command in (["classify", "--format", "tabular"],
                    ["plan", "--format", "tabular"],
                    ["sample", "--samples", "3"],
                    ["verify", "--format", "tabular"]):
        print("$ mintraj", command[0])
        code = main([command[0], "--input", str(path), *command[1:]])
        print("exit", code, "\n")
