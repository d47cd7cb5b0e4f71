"""Acceptance battery: one test per criterion, each printing its PASS/FAIL line.

Criteria 1-7 run once per session into a shared output directory; criterion 8
reruns the whole battery with the same seed and compares the files byte for byte.
"""

import json

import pytest

from comparison_lab import acceptance


@pytest.fixture(scope="module")
def battery(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    seed = acceptance.default_seed()
    results = {r.number: r for r in acceptance.run_battery(seed, out)}
    return seed, out, results


def _report(res, capsys):
    with capsys.disabled():
        print("\n" + res.line())
    failed = [k for k, ok in res.checks.items() if not ok]
    assert not failed, f"failed checks: {failed}; metrics: {res.metrics}"
    assert res.runtime <= res.budget, f"runtime {res.runtime:.1f}s over budget {res.budget}s"
    assert res.passed


@pytest.mark.parametrize("number", range(1, 8))
def test_criterion(number, battery, capsys):
    _, out, results = battery
    res = results[number]
    _report(res, capsys)
    for name in res.files:
        assert (out / name).stat().st_size > 0
    written = json.loads((out / f"criterion_{number}.json").read_text())
    assert "runtime" not in written


def test_criterion_8_determinism(battery, capsys):
    seed, out, _ = battery
    res = acceptance.criterion_8(seed, reference_dir=out)
    assert res.metrics["files_compared"] > 10
    _report(res, capsys)
