"""Acceptance criteria 1-10, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import json
import sys
import time

import pytest

from mwcurves.audits import run_suite
from mwcurves.cli import main as cli_main

LINES = []
_cache = {}


def record(number, title, ok, detail):
    line = f"criterion {number:>2} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    LINES.append(line)
    return line


def emit(capsys, line):
    with capsys.disabled():
        print("\n" + line)


def timed_suite(name, **kw):
    key = (name, tuple(sorted(kw.items())))
    if key not in _cache:
        t0 = time.perf_counter()
        rep = run_suite(name, **kw)
        _cache[key] = (rep, time.perf_counter() - t0)
    return _cache[key]


def failed_where(rep, pred):
    return sum(c for case, c in rep["failed_by_case"].items() if pred(case))


def cases_where(rep, pred):
    return sum(c for case, c in rep["cases"].items() if pred(case))


def crit_1():
    rep, dt = timed_suite("relations")
    ok = rep["passed"] and dt < 30
    return record(1, "defining relations", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s (limit 30s)")


def crit_2():
    rep, dt = timed_suite("structure")
    ok = rep["passed"] and dt < 60
    return record(2, "structure enumeration", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s (limit 60s)")


def crit_3():
    rep, dt = timed_suite("residues", trials=300)
    ok = rep["passed"]
    return record(3, "residue characterization", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s")


def _is_cross(case):
    return "geometric = canonical" in case or "projection formula" in case


def crit_4():
    rep, dt = timed_suite("transfers")
    bad = failed_where(rep, lambda c: not _is_cross(c))
    n = cases_where(rep, lambda c: not _is_cross(c))
    ok = bad == 0 and n > 0 and dt < 120
    return record(4, "transfer well-definedness", ok, f"{n} cases, {bad} failed, suite {dt:.1f}s (limit 120s)")


def crit_5():
    rep, dt = timed_suite("transfers")
    bad = failed_where(rep, _is_cross)
    n = cases_where(rep, _is_cross)
    degrees = sorted({case.split(":")[0] for case in rep["cases"] if "geometric = canonical" in case})
    ok = bad == 0 and len(degrees) == 8
    return record(5, "geometric vs canonical transfer", ok, f"{n} cases over {'; '.join(degrees)}, {bad} failed")


def crit_6():
    rep, dt = timed_suite("reciprocity", trials=500)
    ok = rep["passed"] and dt < 300
    return record(6, "reciprocity on P^1", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s (limit 300s)")


def crit_7():
    rep, dt = timed_suite("homotopy", trials=100)
    ok = rep["passed"]
    return record(7, "homotopy invariance audit", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s")


def crit_8():
    rep, dt = timed_suite("basechange")
    ok = rep["passed"]
    return record(8, "base-change square", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s")


def crit_9():
    rep, dt = timed_suite("twists", trials=200)
    ok = rep["passed"]
    return record(9, "twist laws", ok, f"{rep['total_cases']} cases, {rep['failed']} failed, {dt:.1f}s")


def crit_10(tmp_dir):
    runs = [
        ["audit", "--suite", "relations", "--q", "5"],
        ["audit", "--suite", "reciprocity", "--q", "3", "--trials", "40", "--seed", "17"],
        ["audit", "--suite", "homotopy", "--q", "5", "--trials", "10", "--seed", "3"],
        ["audit", "--suite", "twists", "--q", "7", "--trials", "30", "--seed", "5"],
    ]
    same = 0
    for i, argv in enumerate(runs):
        blobs = []
        for j in range(2):
            path = f"{tmp_dir}/run{i}_{j}.json"
            cli_main(argv + ["--out", path])
            with open(path, "rb") as fh:
                blobs.append(fh.read())
        same += blobs[0] == blobs[1] and json.loads(blobs[0])["passed"]
    direct = json.dumps(run_suite("residues", qs=[5], trials=20, seed=4), sort_keys=True)
    again = json.dumps(run_suite("residues", qs=[5], trials=20, seed=4), sort_keys=True)
    ok = same == len(runs) and direct == again
    return record(10, "determinism", ok, f"{same}/{len(runs)} CLI reports byte-identical, library report stable: {direct == again}")


CRITERIA = [crit_1, crit_2, crit_3, crit_4, crit_5, crit_6, crit_7, crit_8, crit_9]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(crit, capsys):
    line = crit()
    emit(capsys, line)
    assert "[PASS]" in line, line


def test_criterion_10(capsys, tmp_path):
    line = crit_10(str(tmp_path))
    emit(capsys, line)
    assert "[PASS]" in line, line


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        for crit in CRITERIA:
            print(crit(), flush=True)
        print(crit_10(d), flush=True)
    sys.exit(0 if all("[PASS]" in ln for ln in LINES) else 1)
