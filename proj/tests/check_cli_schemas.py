"""Runs the CLI, validates every --json output against docs/schemas and
checks exit codes and run-to-run reproducibility."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

BIN = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])

resources = []
schemas = {}
for path in sorted(SCHEMAS.glob("*.json")):
    doc = json.loads(path.read_text())
    resources.append((doc["$id"], Resource.from_contents(doc)))
    schemas[path.stem] = doc
registry = Registry().with_resources(resources)

failures = []


def run(args, expect=0):
    p = subprocess.run([BIN, *args], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{args}: exit {p.returncode}, expected {expect}: {p.stderr.strip()}")
    return p


def check(schema, args):
    p = run(args)
    if p.returncode != 0:
        return None
    doc = json.loads(p.stdout)
    validator = jsonschema.Draft202012Validator(schemas[schema], registry=registry)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    for e in errors[:3]:
        failures.append(f"{args}: {list(e.path)}: {e.message}")
    again = run(args)
    if again.stdout != p.stdout:
        failures.append(f"{args}: output differs between runs")
    return doc


out = tempfile.mkdtemp()
check("catalog", ["catalog", "list", "--json"])
check("catalog", ["catalog", "show", "H2.hyperbolic", "--json"])
doc = check("classify", ["classify", "--field", "H2.elliptic", "--point", "0,0"])
assert doc is None or doc["reports"][0]["class"] == "Elliptic"
doc = check("classify", ["classify", "--field", "H2.helmholtz-cusp", "--auto"])
assert doc is None or [r["class"] for r in doc["reports"]] == ["Cusp"]
check("classify", ["classify", "--field", "H3.DHt", "--param", "t=-0.25", "--auto", "--res", "21"])
check("classify", ["classify", "--field", "x^2 + a*y^3 + i*y", "--param", "a=0", "--point", "0,0"])
check("scan", ["scan", "--field", "H2.Ht", "--param", "t=-0.25"])
check("trace", ["trace", "--field", "H3.DHt", "--param", "t=-0.25", "--res", "21"])
doc = check("sweep", ["sweep", "--field", "H2.cusp-family", "--param", "a", "--values", "-0.25,0,0.25"])
assert doc is None or doc["result"]["counts"] == [1, 1, 3]
doc = check("verify", ["verify", "--field", "H2.helmholtz-hyperbolic", "--helmholtz", "1"])
assert doc is None or doc["result"]["sup_abs"] < 1e-10
check("verify", ["verify", "--field", "H3.helmholtz-It", "--wave", "1", "--res", "11"])
check("strata", ["strata", "--field", "H2.helmholtz-hyperbolic", "--auto"])
check("montecarlo", ["montecarlo", "--seed", "7", "--n", "5", "--json"])
check("render", ["render", "--field", "H2.Ht", "--param", "t", "--values", "-0.25,0,0.25",
                 "--res", "41", "--out", out])

# exit codes
run(["catalog", "show", "nope"], 2)
run(["classify", "--field", "H2.regular", "--point", "0.5,0.5"], 4)
run(["classify", "--field", "(x+i*y)^2", "--point", "0,0", "--strict"], 3)
run(["classify", "--field", "(x+i*y)^2", "--point", "0,0"], 0)
run(["classify", "--field", "x^^2", "--point", "0,0"], 2)
run(["classify", "--field", "H2.regular"], 2)
run(["bogus"], 2)
run(["verify", "--field", "H2.regular", "--wave", "1"], 4)
p = run(["montecarlo", "--seed", "7", "--n", "20"])
rows = p.stdout.strip().splitlines()
if not rows or "Elliptic" in "".join(r.split(",")[6] for r in rows[1:]):
    failures.append("montecarlo CSV has an Elliptic row or no header")

for f in failures:
    print("FAIL:", f)
print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
