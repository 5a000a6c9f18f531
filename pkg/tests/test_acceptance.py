"""Acceptance gate: one experiment per criterion, each at its stated tolerance.

Run under pytest (a summary section lists every verdict) or directly with
``python tests/test_acceptance.py``.
"""

import sys
import time

import pytest

from sympval import experiments as ex

CRITERIA = [
    (1, "counting growth", ex.counting_growth),
    (2, "volume formula", ex.volume_formula),
    (3, "closed-form coefficient", ex.closed_form_cg),
    (4, "primitive factor", ex.primitive_factor),
    (5, "congruence factor", ex.congruence_factor),
    (6, "Rogers weights", ex.rogers_weights),
    (7, "Siegel mean value", ex.siegel_mean_2d),
    (8, "discrepancy max-inequality", ex.discrepancy_check),
    (9, "exponent window", ex.exponent_windows),
    (10, "density search", ex.density_search),
    (11, "Lie algebra checks", ex.lie_checks),
    (12, "enumeration oracle", ex.enumeration_oracle),
]


def evaluate(num, name, func):
    t0 = time.perf_counter()
    out = func()
    dt = time.perf_counter() - t0
    detail = "; ".join(out.lines)
    line = f"{'PASS' if out.passed else 'FAIL'} criterion {num}: {name} | {detail} | {dt:.1f}s"
    return out, line


@pytest.mark.slow
@pytest.mark.parametrize("num,name,func", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(num, name, func):
    import conftest

    out, line = evaluate(num, name, func)
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert out.passed, line


if __name__ == "__main__":
    failed = 0
    for num, name, func in CRITERIA:
        out, line = evaluate(num, name, func)
        print(line, flush=True)
        failed += not out.passed
    sys.exit(1 if failed else 0)
