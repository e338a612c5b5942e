"""Validates project files against the XSD: the checked-in fixtures plus
files written by the CLI importer. Usage: check_schema.py XSD CLI FIXTURES"""

import pathlib
import subprocess
import sys
import tempfile

import xmlschema

VALID = ["minimal.xml", "date.xml", "assets.xml"]
INVALID = ["bad_weight.xml"]


def main() -> int:
    xsd, cli, fixtures = sys.argv[1], sys.argv[2], pathlib.Path(sys.argv[3])
    schema = xmlschema.XMLSchema(xsd)
    failures = []

    candidates = [fixtures / name for name in VALID]
    with tempfile.TemporaryDirectory() as tmp:
        out = pathlib.Path(tmp) / "imported.xml"
        for page in ("first", "second"):
            subprocess.run(
                [cli, "import", str(fixtures / "jack_emilia.txt"), str(out), "--page", page, "--player-name", "Jack"],
                check=True, capture_output=True)
        candidates.append(out)
        for path in candidates:
            errors = list(schema.iter_errors(str(path)))
            if errors:
                failures.append(f"{path.name}: {errors[0].reason}")
            else:
                print(f"valid   {path.name}")

    for name in INVALID:
        if schema.is_valid(str(fixtures / name)):
            failures.append(f"{name}: accepted but should be rejected")
        else:
            print(f"invalid {name} (as expected)")

    for f in failures:
        print("FAIL", f)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
