"""Shared session fixtures: one standard grid, operator, and LP family.

Everything downstream treats these as immutable; tests that need other
parameters build their own locally.
"""

import mpmath
import pytest

from dunkl import lp
from dunkl.ensembles import DEFAULT_SEED
from dunkl.measure import build_grid, rank1
from dunkl.thinsets import generate_comb
from dunkl.transform import transform_operator

STD_R = 12.0
STD_N = 1024


def series_highprec(x, y, k):
    """Defining recurrence a_n = y a_{n-1} / (n + k(1 - (-1)^n)) summed at
    50 digits.  The double-precision sum loses ~e^{|xy|} eps to cancellation
    in the oscillatory mode, so comparisons at 1e-10 need this version."""
    with mpmath.workdps(50):
        w = mpmath.mpc(x) * mpmath.mpc(y)
        acc = mpmath.mpc(1)
        coef = mpmath.mpc(1)
        for n in range(1, 500):
            coef = coef * w / (n + k * (1 - (-1) ** n))
            acc += coef
            if n > 2 * abs(w) and abs(coef) < mpmath.mpf("1e-40"):
                break
        return complex(acc)


@pytest.fixture(scope="session")
def cfg1():
    return rank1(1.0)


@pytest.fixture(scope="session")
def grid1024(cfg1):
    return build_grid(STD_R, STD_N, cfg1)


@pytest.fixture(scope="session")
def op1024(grid1024):
    return transform_operator(grid1024)


@pytest.fixture(scope="session")
def family1(grid1024, cfg1):
    return lp.build_family(6, grid1024, cfg1)


@pytest.fixture(scope="session")
def combs05(cfg1):
    S = generate_comb(0.05, 3, cfg1, seed=DEFAULT_SEED)
    Sigma = generate_comb(0.05, 3, cfg1, seed=DEFAULT_SEED + 1)
    return S, Sigma
