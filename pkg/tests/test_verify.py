import pytest

from odometer.padic import BelowResolution, Exact
from odometer.verify import SUITES, report_json, report_text, run_suites, within


@pytest.mark.parametrize("name", sorted(SUITES))
@pytest.mark.parametrize("p,depth", [(2, 6), (3, 4), (5, 3)])
def test_suites_pass(name, p, depth):
    (res,) = run_suites([name], p, depth, 15, seed=11)
    assert res.ok, res.failures
    assert res.checked > 0


def test_degenerate_depth():
    for res in run_suites(["all"], 2, 1, 2, seed=0):
        assert res.ok, (res.name, res.failures)


def test_suite_rng_independent_of_selection():
    alone = run_suites(["isometry"], 3, 5, 20, seed=3)[0]
    together = [r for r in run_suites(["all"], 3, 5, 20, seed=3) if r.name == "isometry"][0]
    assert alone.to_json() == together.to_json()


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites(["nope"], 2, 3, 1, seed=0)


def test_reports():
    results = run_suites(["stabilizer", "wreath"], 2, 3, 2, seed=0)
    text = report_text(results)
    assert text.splitlines()[-1] == "overall       PASS"
    assert report_json(results, 2, 3, 2, 0)["ok"] is True


def test_within():
    assert within(Exact(3), 3) and not within(Exact(2), 3)
    assert within(BelowResolution(4), 4)
