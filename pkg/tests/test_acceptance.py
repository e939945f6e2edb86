"""Acceptance gate: one test per criterion, at the stated tolerances.

Each test prints a PASS/FAIL line (visible with ``pytest -s`` and in the
captured output on failure). The same battery backs ``orliczmax suite``.
"""

import time

import pytest

from orliczmax.acceptance import CRITERIA, run_suite


@pytest.mark.parametrize(
    "index,name,fn", CRITERIA, ids=[f"criterion-{i:02d}-{n.replace(' ', '-')}" for i, n, _ in CRITERIA]
)
def test_criterion(index, name, fn):
    t0 = time.perf_counter()
    ok, detail = fn(quick=False)
    dt = time.perf_counter() - t0
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {index:2d} ({name}): {detail} [{dt:.1f}s]")
    assert ok, f"criterion {index} ({name}): {detail}"


def test_criterion_13_quick_suite_under_two_minutes(capsys):
    t0 = time.perf_counter()
    code = run_suite(quick=True)
    dt = time.perf_counter() - t0
    with capsys.disabled():
        print(f"[{'PASS' if code == 0 and dt < 120 else 'FAIL'}] criterion 13 "
              f"(quick suite wall time): {dt:.1f}s, exit {code}")
    assert code == 0
    assert dt < 120.0
