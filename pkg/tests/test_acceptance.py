"""One test per acceptance criterion, each at its stated tolerance.

Run with ``pytest -s tests/test_acceptance.py`` to see the PASS/FAIL lines.
"""

import pytest

from entcap.verify import NAMES, References, run_criterion


@pytest.mark.parametrize("name", list(NAMES))
def test_criterion(name):
    outcome = run_criterion(NAMES[name], References(), seed=0)
    print(outcome.line())
    assert outcome.passed, outcome.line()
