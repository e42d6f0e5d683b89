"""One line per acceptance criterion: ``[PASS] n name`` or ``[FAIL] n name``.

Tolerances live in the suites (tpbounds.acceptance); this file only runs
them in order on one shared workspace and reports.
"""

import json

import pytest

from tpbounds.acceptance import run_suite

CRITERIA = [
    (1, "rational-identities"),
    (2, "airy-bounds"),
    (3, "bound-validity"),
    (4, "order-checks"),
    (5, "l0-identity"),
    (6, "turning-point"),
    (7, "connection"),
    (8, "properties"),
]


@pytest.mark.parametrize("number,name", CRITERIA, ids=[n for _, n in CRITERIA])
def test_criterion(workspace, capsys, number, name):
    res = run_suite(name, workspace)
    with capsys.disabled():
        print(f"\n[{'PASS' if res.passed else 'FAIL'}] criterion {number} {name} ({res.seconds:.1f} s)")
        if not res.passed:
            print(json.dumps(res.detail, default=str))
    assert res.passed, json.dumps(res.detail, default=str)
