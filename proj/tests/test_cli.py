#!/usr/bin/env python3
"""End-to-end checks of the contract-sa command line tool.

Usage: test_cli.py <path to contract-sa>
"""

import csv
import hashlib
import io
import json
import os
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET

BIN = sys.argv[1]
failures = []


def run(*args, cwd=None):
    return subprocess.run([BIN, *args], capture_output=True, text=True, cwd=cwd)


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def write(path, text):
    with open(path, "w") as f:
        f.write(text)
    return path


SMALL_TDN = """[experiment]
name = cli-tdn
kind = tdn
seed = 5
paths = {paths}
k_max = 300

[mdp]
states = 4
actions = 2
beta = 0.9
seed = 1

[policy]
kind = uniform

[tdn]
n = 2

[schedule]
kind = constant
eps = 0.005
bound = theorem4
"""

with tempfile.TemporaryDirectory() as tmp:
    out = os.path.join(tmp, "out")
    os.mkdir(out)

    r = run()
    check(r.returncode == 2, "no subcommand exits 2")

    r = run("run", os.path.join(tmp, "missing.ini"), "--output-dir", out)
    check(r.returncode == 2, "missing spec file exits 2")

    bad = write(os.path.join(tmp, "bad.ini"), SMALL_TDN.format(paths=0))
    r = run("run", bad, "--output-dir", out)
    check(r.returncode == 2, "paths = 0 exits 2")
    check(os.listdir(out) == [], "rejected spec leaves no files")

    unknown = write(os.path.join(tmp, "unknown.ini"), SMALL_TDN.format(paths=4) + "colour = blue\n")
    r = run("run", unknown, "--output-dir", out)
    check(r.returncode == 2 and "colour" in r.stderr, "unknown key exits 2 and names the key")

    spec = write(os.path.join(tmp, "tdn.ini"), SMALL_TDN.format(paths=8))
    r = run("run", spec, "--output-dir", out)
    check(r.returncode == 0, "small TD(n) run exits 0")
    files = sorted(os.listdir(out))
    check(any(f.endswith(".csv") for f in files), "run writes a CSV")
    check(any(f.endswith(".svg") for f in files), "run writes an SVG")
    check(any(f.endswith(".json") for f in files), "run writes metadata")
    for f in files:
        if f.endswith(".svg"):
            try:
                root = ET.parse(os.path.join(out, f)).getroot()
                check(root.tag.endswith("svg"), f"{f} is well-formed SVG")
            except ET.ParseError as e:
                check(False, f"{f} parses as XML ({e})")
        if f.endswith(".csv"):
            with open(os.path.join(out, f)) as fh:
                rows = list(csv.reader(fh))
            check(len(rows) > 2 and rows[1][0] == "0", f"{f} starts at k = 0")
    meta_files = [f for f in files if f.endswith(".json")]
    if meta_files:
        with open(os.path.join(out, meta_files[0])) as fh:
            meta = json.load(fh)
        check(meta.get("paths") == 8 and meta.get("seed") == 5, "metadata records paths and seed")
        with open(spec, "rb") as fh:
            digest = hashlib.sha256(fh.read()).hexdigest()
        check(meta.get("spec_sha256") == digest, "metadata hashes the spec file")

    again = os.path.join(tmp, "again")
    os.mkdir(again)
    run("run", spec, "--output-dir", again)
    same = all(
        open(os.path.join(out, f), "rb").read() == open(os.path.join(again, f), "rb").read()
        for f in files
        if f.endswith(".csv")
    )
    check(same, "repeated run reproduces the CSV byte for byte")

    params = write(
        os.path.join(tmp, "t4.ini"),
        "[params]\nbeta = 0.9\nn = 3\neps = 0.005\ne0 = 1\nx_star_norm = 1\n",
    )
    r = run("bounds", "compute", "--theorem", "4", "--params", params, "--k-max", "0")
    rows = list(csv.reader(io.StringIO(r.stdout)))
    check(r.returncode == 0 and len(rows) == 2, "bounds with k_max = 0 emits one row")
    check(len(rows) == 2 and float(rows[1][-1]) >= 1.0, "bound at k = 0 is at least the initial error")

    r = run("bounds", "compute", "--theorem", "4", "--params", params, "--k-max", "50")
    rows = list(csv.reader(io.StringIO(r.stdout)))
    vals = [float(x[-1]) for x in rows[1:]]
    check(len(vals) == 51 and all(b <= a + 1e-15 for a, b in zip(vals, vals[1:])), "theorem 4 curve is nonincreasing")

    r = run("bounds", "compute", "--theorem", "9", "--params", params, "--k-max", "5")
    check(r.returncode == 2, "unknown theorem exits 2")

    env = write(os.path.join(tmp, "env.ini"), "[envelope]\nc = l2\ns = l2\nmu = 1\n")
    r = run("envelope", "eval", "--spec", env, "--x", "3,4")
    check(r.returncode == 0 and "6.25" in r.stdout, "envelope of (3,4) with l2/l2 and mu = 1 is 6.25")

    r = run("verify", "all", "--quick")
    check(r.returncode == 0, "quick verify exits 0")
    r = run("verify", "sandwich", "--quick", "--json")
    try:
        report = json.loads(r.stdout)
        check(r.returncode == 0 and report is not None, "verify --json emits JSON")
    except json.JSONDecodeError:
        check(False, "verify --json emits JSON")
    r = run("verify", "nonsense")
    check(r.returncode == 2, "unknown suite exits 2")

if failures:
    print(f"{len(failures)} failure(s)")
    sys.exit(1)
print("all CLI checks passed")
