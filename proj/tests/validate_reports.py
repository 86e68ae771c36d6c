"""Run every CLI subcommand and validate its JSON report against schemas/report.schema.json."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema

cli, root = sys.argv[1], Path(sys.argv[2])
specs = root / "data" / "specs"
schema = json.loads((root / "schemas" / "report.schema.json").read_text())
validator = jsonschema.Draft202012Validator(schema)

runs = [
    ["catalog"],
    ["invariant", "--no-cache", "--spec", specs / "dlo.json"],
    ["compare", "-a", specs / "dlo.json", "-b", specs / "pure_set.json"],
    ["compare", "-a", specs / "pure_set.json", "-b", specs / "pure_set.json"],
    ["wei", "--spec", specs / "equivalence2.json", "--window-level", "1"],
    ["wei", "--spec", specs / "pure_set.json"],
    ["outer", "--spec", specs / "colored3.json", "--age-size", "5"],
    ["outer", "--spec", specs / "vector2.json"],
    ["lattice", "--spec", specs / "pure_set.json", "--window-level", "1"],
    ["genstab", "--spec", specs / "equivalence2.json", "--window-level", "1"],
]

failed = 0
for args in runs:
    args = [str(a) for a in args]
    first = subprocess.run([cli, *args], capture_output=True)
    second = subprocess.run([cli, *args], capture_output=True)
    errors = list(validator.iter_errors(json.loads(first.stdout)))
    if first.stdout != second.stdout:
        errors.append("output differs between identical invocations")
    status = "ok" if not errors else "INVALID"
    print(f"{status:8} exit={first.returncode} {' '.join(args[:1])} {Path(args[-1]).name}")
    for e in errors:
        print(f"    {getattr(e, 'message', e)}")
    failed += bool(errors)

sys.exit(1 if failed else 0)
