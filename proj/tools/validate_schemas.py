#!/usr/bin/env python3
# Copyright 2026 The eurqsi Authors
# SPDX-License-Identifier: Apache-2.0
"""Runs each eurqsi subcommand and validates its JSON against schemas/."""

import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    cli, root = sys.argv[1], pathlib.Path(sys.argv[2])
    schemas = {p.name: json.loads(p.read_text()) for p in (root / "schemas").glob("*.schema.json")}
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items())

    def validate(doc, name):
        jsonschema.Draft202012Validator(schemas[name], registry=registry).validate(doc)

    runs = [
        (["examples"], "examples.schema.json"),
        (["check", "--scenario", str(root / "scenarios" / "max_uncertainty.json")], "check.schema.json"),
        (["check", "--scenario", str(root / "scenarios" / "ghz_tripartite.json")], "check.schema.json"),
        (["fuzz", "--trials", "20", "--seed", "1"], "fuzz.schema.json"),
        (["fuzz", "--trials", "5", "--dim", "3", "--relation", "tripartite_refined"], "fuzz.schema.json"),
        (["experiment", "1", "--shots", "256"], "experiment.schema.json"),
        (["experiment", "6", "--shots", "256", "--noise", "depolarizing=0.1,readout=0.01"],
         "experiment.schema.json"),
    ]
    for args, schema in runs:
        out = subprocess.run([cli, *args], check=True, capture_output=True, text=True).stdout
        validate(json.loads(out), schema)
        print("ok", " ".join(args))
    for path in sorted((root / "scenarios").glob("*.json")):
        validate(json.loads(path.read_text()), "scenario.schema.json")
        print("ok", path.name)
    return 0


if __name__ == "__main__":
    sys.exit(main())
