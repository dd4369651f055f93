"""Thin interval unions: exact measures, certification, generation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from dunkl.measure import interval_measure_1d, rank1
from dunkl.thinsets import (
    SetUnion,
    ThinnessReport,
    ThinSetError,
    dilate,
    generate_comb,
    rho,
    set_measure,
    thinness_check,
)


def density_ratio(S, x, k):
    r = min(1.0, 1.0 / abs(x)) if x != 0 else 1.0
    return set_measure(S, rank1(k), x - r, x + r) / interval_measure_1d(
        x - r, x + r, k
    )


def test_rho_values():
    assert rho(0.0) == 1.0
    assert rho(0.5) == 1.0
    assert rho(2.0) == 0.5
    assert np.allclose(rho([-4.0, 1.0]), [0.25, 1.0])


def test_empty_set_is_exactly_zero():
    rep = thinness_check(SetUnion(1, ()), rank1(1.0))
    assert rep.epsilon_hat == 0.0
    assert rep.argmax == 0.0


def test_single_centered_interval_exact():
    # ball B(0, 1) contains the interval and minimizes the denominator,
    # so the sup ratio has a closed form attained at x = 0
    for k in (0.0, 1.0):
        S = SetUnion(1, (((-0.2), 0.2),))
        rep = thinness_check(S, rank1(k))
        exact = set_measure(S, rank1(k)) / interval_measure_1d(-1.0, 1.0, k)
        assert rep.epsilon_hat == pytest.approx(exact, abs=1e-12)
        if k > 0:
            assert abs(rep.argmax) < 1e-9  # k = 0 maximizes on a plateau


def test_single_interval_vs_optimizer():
    # continuum refinement around the certified argmax gains nothing
    for k in (0.0, 1.0):
        S = SetUnion(1, ((1.3, 1.5),))
        rep = thinness_check(S, rank1(k))
        res = minimize_scalar(
            lambda x: -density_ratio(S, x, k),
            bounds=(rep.argmax - 0.05, rep.argmax + 0.05),
            method="bounded",
            options={"xatol": 1e-12},
        )
        assert -res.fun <= rep.epsilon_hat + 1e-12


def test_comb_certified(combs05, cfg1):
    S, Sigma = combs05
    assert thinness_check(S, cfg1).epsilon_hat <= 0.05
    assert thinness_check(Sigma, cfg1).epsilon_hat <= 0.05


def test_comb_other_targets():
    S = generate_comb(0.1, 3, rank1(0.0), seed=5)
    assert thinness_check(S, rank1(0.0)).epsilon_hat <= 0.1


def test_comb_reflection_symmetric(combs05):
    S, _ = combs05
    pieces = set(S.pieces)
    for a, b in S.pieces:
        assert (-b, -a) in pieces


def test_contains_vectorized(combs05):
    S, _ = combs05
    a, b = S.pieces[0]
    mid = 0.5 * (a + b)
    got = S.contains([mid, 0.0, 100.0])
    assert got.tolist() == [True, False, False]


def test_complement_within(combs05, cfg1):
    S, _ = combs05
    lo, hi = -4.0, 4.0
    comp = S.complement_within(lo, hi)
    assert not np.any(comp.contains([0.5 * (a + b) for a, b in S.pieces if a > lo and b < hi]))
    total = set_measure(S, cfg1, lo, hi) + set_measure(comp, cfg1, lo, hi)
    assert total == pytest.approx(interval_measure_1d(lo, hi, 1.0), rel=1e-12)


def test_dilate_measure_scaling():
    k = 1.0
    S = SetUnion(1, ((0.5, 0.7), (1.1, 1.2)))
    lam = 1.7
    hom = 1.0 + 2.0 * k
    assert set_measure(dilate(S, lam), rank1(k)) == pytest.approx(
        lam**hom * set_measure(S, rank1(k)), rel=1e-12
    )
    with pytest.raises(ThinSetError):
        dilate(S, 0.0)


@given(drop=st.sets(st.integers(1, 4), max_size=3))
@settings(max_examples=20, deadline=None)
def test_subset_monotone(drop):
    # removing interior teeth cannot raise the certified density
    cfg = rank1(1.0)
    S = generate_comb(0.15, 6, cfg, seed=3)
    half = len(S.pieces) // 2
    right = list(S.pieces[half:])  # positive-side teeth, index 0..5
    kept = [p for i, p in enumerate(right) if i not in drop]
    sub_pieces = sorted(kept + [(-b, -a) for a, b in kept])
    sub = SetUnion(1, tuple(sub_pieces))
    full = thinness_check(S, cfg, R_check=12.0, samples=960)
    part = thinness_check(sub, cfg, R_check=12.0, samples=960)
    assert part.epsilon_hat <= full.epsilon_hat + 1e-15


def test_json_round_trip(combs05):
    S, _ = combs05
    back = SetUnion.from_json(S.to_json())
    assert back.pieces == S.pieces


def test_validation_errors():
    with pytest.raises(ThinSetError):
        SetUnion(1, ((0.0, 1.0), (0.5, 2.0)))  # overlap
    with pytest.raises(ThinSetError):
        SetUnion(1, ((1.0, 1.0),))  # degenerate
    with pytest.raises(ThinSetError):
        SetUnion(2, ((0.0, 1.0),))
    with pytest.raises(ThinSetError):
        generate_comb(1.5, 3, rank1(1.0))
    with pytest.raises(ThinSetError):
        generate_comb(0.1, 0, rank1(1.0))
    with pytest.raises(ThinSetError):
        ThinnessReport(1.5, 0.0, 10, 2.0)


def test_report_fields(combs05, cfg1):
    S, _ = combs05
    rep = thinness_check(S, cfg1)
    assert rep.n_samples > 0
    assert rep.R_check >= 2.0 * S.extent
    assert rep.samples_per_unit > 0
