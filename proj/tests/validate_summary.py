#!/usr/bin/env python3
"""Validate fracprox summary.json files against the shipped schema."""

import json
import sys

import jsonschema


def main() -> int:
    if len(sys.argv) < 3:
        print("usage: validate_summary.py SCHEMA SUMMARY...", file=sys.stderr)
        return 2
    with open(sys.argv[1]) as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    failed = 0
    for path in sys.argv[2:]:
        with open(path) as f:
            doc = json.load(f)
        errors = list(validator.iter_errors(doc))
        for err in errors:
            print(f"{path}: {err.message}", file=sys.stderr)
        failed += bool(errors)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
