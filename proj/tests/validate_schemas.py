#!/usr/bin/env python3
"""Run every CLI command once and validate its JSON output against the shipped schemas."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

RUNS = [
    ("estimate-hull", ["estimate-hull"], "set=circle\nmap=scaling\nL=3\ndelta=0.01\n", "report.json", "estimate_hull"),
    ("estimate-hull-sphere", ["estimate-hull"], "set=sphere\nmap=identity\nM=200\ndense_M=5000\n", "report.json", "estimate_hull"),
    ("sample-cover", ["sample-cover"], "set=sphere\nradius=2\nM=100\nmethod=uniform\ndense_M=5000\n", "cover.json", "cover"),
    ("bound", ["bound"], "L_bar=1\nH_bar=0\nr=1\ndelta=0.1\nepsilon=0.01\nlevel=0.9\n", "bound.json", "bound"),
    ("reach", ["reach"], "system=linear2d\nM=30\ndense_M=5000\n", "report.json", "reach"),
    ("solve-ocp", ["solve-ocp"], "M=100\n", "report.json", "ocp_report"),
    ("sensitivity", ["experiment", "sensitivity"], "L=3\ntrials=2\nM_list=20,40\n", "sensitivity.json", "sensitivity"),
    ("experiment-ocp", ["experiment", "ocp"], "", "report.json", "ocp_report"),
]


def main():
    cli, schema_dir = sys.argv[1], Path(sys.argv[2])
    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, cmd, config, output, schema in RUNS:
            work = Path(tmp) / name
            work.mkdir()
            (work / "run.cfg").write_text(config)
            proc = subprocess.run([cli, *cmd, "--config", str(work / "run.cfg"), "--out", str(work / "out")],
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                print(f"FAIL {name}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            doc = json.loads((work / "out" / output).read_text())
            schema_doc = json.loads((schema_dir / f"{schema}.schema.json").read_text())
            try:
                jsonschema.validate(doc, schema_doc, cls=jsonschema.Draft202012Validator)
                print(f"ok   {name}")
            except jsonschema.ValidationError as e:
                print(f"FAIL {name}: {e.message} at {list(e.absolute_path)}")
                failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
