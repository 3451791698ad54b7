#!/usr/bin/env python3
"""Regenerates the *.expected files by running every query through a
reference Prolog (scryer-prolog). Usage: regen_expected.py [path/to/scryer-prolog]"""
import pathlib
import subprocess
import sys
import tempfile

PROLOG = sys.argv[1] if len(sys.argv) > 1 else "scryer-prolog"
HERE = pathlib.Path(__file__).parent


def run(program: str, query: str) -> str:
    driver = (
        program
        + "\n:- initialization(oracle_main).\n"
        + f"oracle_main :- Q = ({query}), findall(Q, Q, L), writeq(L), nl.\n"
    )
    with tempfile.NamedTemporaryFile("w", suffix=".pl", delete=False) as f:
        f.write(driver)
        path = f.name
    out = subprocess.run([PROLOG, path, "-g", "halt"], capture_output=True, text=True, timeout=60)
    lines = [l for l in out.stdout.splitlines() if l.strip() and not l.startswith("%")]
    if out.returncode != 0 or len(lines) != 1 or not lines[0].startswith("["):
        raise SystemExit(f"oracle failed on {query!r}: {out.stdout!r} {out.stderr!r}")
    return lines[0]


for pl in sorted(HERE.glob("*.pl")):
    text = pl.read_text()
    queries = [l.split(":", 1)[1].strip() for l in text.splitlines() if l.startswith("% query:")]
    results = [run(text, q) for q in queries]
    pl.with_suffix(".expected").write_text("\n".join(results) + "\n")
    print(pl.name, len(results))
