"""The ten acceptance criteria, run exactly as `artifact acceptance run` runs them."""

import pytest

from artifact.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    res = run_criterion(number, seed=0)
    with capsys.disabled():
        print(f"\n{res.line()}  ({res.seconds:.1f}s)")
    assert res.checks_passed, res.failures
    assert res.within_budget, f"took {res.seconds:.1f}s, budget {res.budget}s"
