"""One test per acceptance criterion, each at its stated tolerance.

Every criterion prints a PASS/FAIL line; the lines are repeated in the
terminal summary under "acceptance criteria".
"""

import pytest

from conftest import ACCEPTANCE_LINES
from dicke_fringe.acceptance import CRITERIA, MC_BUDGET, MC_SEED, run_criterion


@pytest.mark.parametrize(
    "number", [c[0] for c in CRITERIA],
    ids=[f"{c[0]:02d}-{c[1].replace(' ', '-')}" for c in CRITERIA],
)
def test_criterion(number):
    is_mc = next(c[3] for c in CRITERIA if c[0] == number)
    kwargs = {"budget": MC_BUDGET, "seed": MC_SEED} if is_mc else {}
    result = run_criterion(number, **kwargs)
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert result.passed, line
