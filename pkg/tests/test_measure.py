"""Weighted measure, quadrature grids, and sampled-function plumbing."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from dunkl.measure import (
    GridError,
    RootSystemConfig,
    SampledFunction,
    ball_measure,
    ball_measure_bound,
    build_grid,
    grid_from_json,
    grid_to_json,
    interval_measure_1d,
    rank1,
    weight_density,
)


def closed_interval_mass(a: float, b: float, k: float) -> float:
    # int_a^b 2^k |x|^{2k} dx, the rank-one weight, done by the power rule
    def anti(t: float) -> float:
        return 2.0**k * math.copysign(abs(t) ** (2 * k + 1), t) / (2 * k + 1)

    return anti(b) - anti(a)


def test_interval_measure_matches_power_rule():
    for k in (0.0, 0.5, 1.0, 2.5):
        for a, b in ((-3.0, 1.2), (0.0, 4.0), (-0.7, -0.1)):
            assert interval_measure_1d(a, b, k) == pytest.approx(
                closed_interval_mass(a, b, k), rel=1e-13
            )


@given(
    a=st.floats(-8, 8),
    m=st.floats(0.01, 6),
    w=st.floats(0.01, 6),
    k=st.floats(0, 4),
)
@settings(max_examples=40, deadline=None)
def test_interval_measure_additive(a, m, w, k):
    whole = interval_measure_1d(a, a + m + w, k)
    split = interval_measure_1d(a, a + m, k) + interval_measure_1d(a + m, a + m + w, k)
    assert whole == pytest.approx(split, rel=1e-12, abs=1e-14)


def test_weights_integrate_the_weight_density(grid1024, cfg1):
    total = float(np.sum(grid1024.weights))
    ref, err = quad(lambda x: weight_density(x, cfg1), -grid1024.R, grid1024.R)
    assert total == pytest.approx(ref, rel=1e-10, abs=10 * err)


def test_gaussian_mass_closed_form():
    # int e^{-x^2} dmu_k = 2^k Gamma(k + 1/2) in rank one
    for k in (0.0, 0.5, 1.0, 2.5):
        grid = build_grid(12.0, 512, rank1(k))
        got = float(np.sum(grid.weights * np.exp(-grid.x**2)))
        assert got == pytest.approx(2.0**k * math.gamma(k + 0.5), rel=1e-10)


def test_polynomial_quadrature_exact_on_panels(grid1024):
    # composite Gauss-Legendre: x^12 * |x|^2 weight integrated exactly
    got = float(np.sum(grid1024.weights * grid1024.x**12))
    ref = closed_interval_mass(-grid1024.R, grid1024.R, 1.0 + 6.0) / 2.0**6
    assert got == pytest.approx(ref, rel=1e-12)


@given(c=st.floats(-6, 6), r=st.floats(0.05, 3), k=st.floats(0, 3))
@settings(max_examples=30, deadline=None)
def test_ball_measure_and_comparability_envelope(c, r, k):
    cfg = rank1(k)
    mass = ball_measure(c, r, cfg)
    ref = interval_measure_1d(c - r, c + r, k)
    assert mass == pytest.approx(ref, rel=1e-12, abs=1e-15)
    envelope, ratio = ball_measure_bound(c, r, cfg)
    assert mass == pytest.approx(envelope * ratio, rel=1e-12)
    # the envelope is comparable to the measure, uniformly in (c, r)
    assert 0.05 < ratio < 20.0


def test_grid_json_round_trip_bit_exact(grid1024):
    clone = grid_from_json(grid_to_json(grid1024))
    assert grid_to_json(clone) == grid_to_json(grid1024)
    assert np.array_equal(clone.x, grid1024.x)
    assert np.array_equal(clone.weights, grid1024.weights)
    doc = json.loads(grid_to_json(grid1024))
    assert {"d", "multiplicities", "R", "n_axis", "version"} <= set(doc)


def test_grid_nodes_symmetric(grid1024):
    assert np.allclose(grid1024.x, -grid1024.x[::-1], atol=0.0)
    assert np.allclose(grid1024.weights, grid1024.weights[::-1], atol=0.0)
    assert np.all(grid1024.weights > 0)


def test_sampled_function_norms(grid1024):
    x = grid1024.x
    f = SampledFunction(grid1024, (x * np.exp(-(x**2) / 2)).astype(np.complex128))
    direct = math.sqrt(float(np.sum(grid1024.weights * np.abs(f.values) ** 2)))
    assert f.norm() == pytest.approx(direct, rel=1e-14)
    assert f.l1_norm() == pytest.approx(
        float(np.sum(grid1024.weights * np.abs(f.values))), rel=1e-14
    )
    assert f.normalized().norm() == pytest.approx(1.0, rel=1e-12)
    assert f.mass() == pytest.approx(0.0, abs=1e-14)  # odd integrand


def test_config_validation():
    with pytest.raises(GridError):
        RootSystemConfig(d=0, multiplicities=())
    with pytest.raises(GridError):
        RootSystemConfig(d=2, multiplicities=(1.0,))
    with pytest.raises(GridError):
        rank1(-0.5)
    cfg = RootSystemConfig(d=2, multiplicities=(1.0, 0.5))
    assert cfg.gamma_k == 1.5
    assert cfg.homogeneity == 5.0


def test_build_grid_rejects_bad_shapes(cfg1):
    with pytest.raises(GridError):
        build_grid(-1.0, 128, cfg1)
    with pytest.raises(GridError):
        build_grid(12.0, 0, cfg1)
