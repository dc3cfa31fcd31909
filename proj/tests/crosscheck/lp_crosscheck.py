"""Solve exported LP files with scipy's MILP solver (HiGHS) and compare the
optimal objectives with the ones reported by our own solver."""

import re
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

TERM = re.compile(r"([+-]?)\s*(\d+)\s+([A-Za-z_][A-Za-z0-9_]*)")


def parse_terms(text):
    """Returns ({name: coef}, constant) for a sum like '-1 x + 3 y + 4'."""
    terms = {}
    pos = 0
    for m in TERM.finditer(text):
        sign = -1 if m.group(1) == "-" else 1
        terms[m.group(3)] = terms.get(m.group(3), 0) + sign * int(m.group(2))
        pos = m.end()
    rest = text[pos:].replace(" ", "")
    const = int(rest) if rest else 0
    return terms, const


def read_lp(path):
    section = None
    obj_text = ""
    rows = []
    bounds = {}
    integer = []
    for raw in Path(path).read_text().splitlines():
        line = raw.rstrip()
        if not line or line.startswith("\\"):
            continue
        head = line.strip()
        if head in ("Minimize", "Subject To", "Bounds", "Generals", "Binaries", "End"):
            section = head
            continue
        if section == "Minimize":
            obj_text += " " + head.split(":", 1)[-1] if head.startswith("obj:") else " " + head
        elif section == "Subject To":
            if re.match(r"^[A-Za-z_][A-Za-z0-9_]*:", head):
                rows.append(head.split(":", 1)[1])
            else:
                rows[-1] += " " + head
        elif section == "Bounds":
            lo, name, hi = re.match(r"^(-?\d+) <= (\S+) <= (-?\d+)$", head).groups()
            bounds[name] = (int(lo), int(hi))
        elif section in ("Generals", "Binaries"):
            integer.extend(head.split())
    names = list(bounds)
    index = {n: i for i, n in enumerate(names)}
    cost, const = parse_terms(obj_text)
    c = np.zeros(len(names))
    for n, a in cost.items():
        c[index[n]] = a
    a_rows, lbs, ubs = [], [], []
    for row in rows:
        lhs, rel, rhs = re.match(r"^(.*?)\s*(<=|>=|=)\s*(-?\d+)$", row.strip()).groups()
        terms, _ = parse_terms(lhs)
        a = np.zeros(len(names))
        for n, v in terms.items():
            a[index[n]] = v
        a_rows.append(a)
        rhs = float(rhs)
        lbs.append(rhs if rel in (">=", "=") else -np.inf)
        ubs.append(rhs if rel in ("<=", "=") else np.inf)
    lo = np.array([bounds[n][0] for n in names], dtype=float)
    hi = np.array([bounds[n][1] for n in names], dtype=float)
    integrality = np.zeros(len(names))
    for n in integer:
        integrality[index[n]] = 1
    return c, const, a_rows, lbs, ubs, lo, hi, integrality


def solve(path):
    c, const, a_rows, lbs, ubs, lo, hi, integrality = read_lp(path)
    constraints = [LinearConstraint(np.array(a_rows), lbs, ubs)] if a_rows else []
    res = milp(c, constraints=constraints, integrality=integrality, bounds=Bounds(lo, hi),
               options={"mip_rel_gap": 0})
    if res.status == 2:
        return None
    if res.status != 0:
        raise RuntimeError(f"{path}: scipy status {res.status}: {res.message}")
    return res.fun + const


def main():
    exporter = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([exporter, tmp], check=True)
        failures = 0
        lines = (Path(tmp) / "manifest.txt").read_text().splitlines()
        for line in lines:
            name, ours = line.split()
            theirs = solve(Path(tmp) / name)
            if ours == "infeasible":
                ok = theirs is None
            else:
                ok = theirs is not None and abs(theirs - int(ours)) < 1e-6
            print(f"{'ok  ' if ok else 'FAIL'} {name}: ours {ours}, scipy {theirs}")
            failures += 0 if ok else 1
        print(f"{len(lines) - failures}/{len(lines)} instances agree")
        return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
